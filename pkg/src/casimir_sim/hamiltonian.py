"""Time-dependent Hamiltonian of the driven qubit-cavity system.

Units: hbar = 1 and energies are quoted in multiples of the static cavity
frequency omega0. The full operator is

    H(t) = w(t) a'a + (epsilon/2)(1 + sigma_z) + (dw/dt / 4 w) i(a^2 - a'^2)
           + selected interaction terms,

where the interaction splits into an excitation-conserving part
g(a sigma+ + a' sigma-) and a counterrotating part g(a' sigma+ + a sigma-).
Constant blocks are cached once; evaluation at time t only rescales the
photon-number and squeeze blocks by two scalars.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .operators import OperatorSet

# Modulation amplitudes and couplings beyond this fraction of omega0 leave
# the weak-coupling regime the model is meant for; we warn but do not stop.
WEAK_REGIME_FRACTION = 0.2


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters (rates in units of omega0 = 1)."""

    omega0: float = 1.0
    epsilon: float = 1.0
    g: float = 0.05
    kappa: float = 0.0
    gamma: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        for name in ("kappa", "gamma", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.g > WEAK_REGIME_FRACTION * self.omega0:
            warnings.warn(
                f"g = {self.g} exceeds {WEAK_REGIME_FRACTION} * omega0; "
                "results leave the supported weak-coupling regime",
                stacklevel=2,
            )

    @property
    def detuning(self) -> float:
        """Qubit-cavity detuning epsilon - omega0."""
        return self.epsilon - self.omega0

    @property
    def rabi_period(self) -> float:
        """Vacuum exchange period pi / g (infinite when g = 0)."""
        return math.pi / self.g if self.g > 0 else math.inf


# --------------------------------------------------------------------------
# drive protocols


@dataclass(frozen=True)
class Constant:
    """Fixed cavity frequency, no modulation."""

    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    def value(self, t: float) -> float:
        return self.omega

    def derivative(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class Cosine:
    """Harmonic modulation w(t) = omega0 + d cos(Omega t)."""

    omega0: float
    d: float
    Omega: float

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.Omega <= 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        if not 0 <= self.d < self.omega0:
            # d >= omega0 would drive w(t) through zero.
            raise ValueError(
                f"d must satisfy 0 <= d < omega0, got d={self.d}, "
                f"omega0={self.omega0}"
            )
        if self.d > WEAK_REGIME_FRACTION * self.omega0:
            warnings.warn(
                f"d = {self.d} exceeds {WEAK_REGIME_FRACTION} * omega0; "
                "results leave the supported weak-modulation regime",
                stacklevel=2,
            )

    def value(self, t: float) -> float:
        return self.omega0 + self.d * math.cos(self.Omega * t)

    def derivative(self, t: float) -> float:
        return -self.d * self.Omega * math.sin(self.Omega * t)


@dataclass(frozen=True)
class SwitchRamp:
    """Smooth switch from omega1 to omega2 around t_switch over width tau.

    w(t) = omega1 + (omega2 - omega1) * (1 + tanh((t - t_switch)/tau)) / 2
    with the exact analytic derivative; tau -> 0 approaches a sudden jump.
    """

    omega1: float
    omega2: float
    t_switch: float
    tau: float

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("omega1 and omega2 must be positive")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    def value(self, t: float) -> float:
        x = (t - self.t_switch) / self.tau
        return self.omega1 + 0.5 * (self.omega2 - self.omega1) * (1.0 + math.tanh(x))

    def derivative(self, t: float) -> float:
        x = (t - self.t_switch) / self.tau
        if abs(x) > 300.0:
            # sech^2 underflows far from the ramp; avoid cosh overflow.
            return 0.0
        sech = 1.0 / math.cosh(x)
        return 0.5 * (self.omega2 - self.omega1) / self.tau * sech * sech


DriveProtocol = Constant | Cosine | SwitchRamp


def drive_value(protocol: DriveProtocol, t: float) -> float:
    """Instantaneous cavity frequency w(t)."""
    return protocol.value(t)


def drive_derivative(protocol: DriveProtocol, t: float) -> float:
    """Instantaneous dw/dt."""
    return protocol.derivative(t)


# --------------------------------------------------------------------------
# term selection


class Interaction(enum.Enum):
    FULL = "full"
    JAYNES_CUMMINGS = "jc"
    ANTI_JAYNES_CUMMINGS = "ajc"
    NONE = "none"


@dataclass(frozen=True)
class TermSelection:
    """Which qubit-photon interaction terms and whether the squeeze term enter."""

    include_casimir: bool = True
    interaction: Interaction = Interaction.FULL


def _interaction_matrix(ops: OperatorSet, g: float, which: Interaction) -> np.ndarray:
    """Interaction block; the two parts live on disjoint matrix entries."""
    rotating = ops.sigma_plus @ ops.a  # a sigma+ : (e,n) <- (g,n+1)
    counter = ops.sigma_plus @ ops.a_dag  # a' sigma+ : (e,n+1) <- (g,n)
    v_rot = g * (rotating + rotating.conj().T)
    v_cnt = g * (counter + counter.conj().T)
    if which is Interaction.FULL:
        return v_rot + v_cnt
    if which is Interaction.JAYNES_CUMMINGS:
        return v_rot
    if which is Interaction.ANTI_JAYNES_CUMMINGS:
        return v_cnt
    return np.zeros_like(v_rot)


class HamiltonianTerms:
    """Cached constant blocks of H; evaluation rescales two of them by t."""

    def __init__(
        self,
        ops: OperatorSet,
        params: SystemParams,
        protocol: DriveProtocol,
        terms: TermSelection = TermSelection(),
    ):
        self.ops = ops
        self.params = params
        self.protocol = protocol
        self.terms = terms
        excited = ops.sigma_plus @ ops.sigma_minus
        self.static = params.epsilon * excited + _interaction_matrix(
            ops, params.g, terms.interaction
        )
        self.number = ops.n_op
        # i(a^2 - a'^2) is hermitian; its prefactor dw/dt / (4 w) is real.
        self.squeeze = 1j * (ops.a_sq - ops.a_dag_sq)

    def casimir_coefficient(self, t: float) -> float:
        if not self.terms.include_casimir:
            return 0.0
        return self.protocol.derivative(t) / (4.0 * self.protocol.value(t))

    def at(self, t: float, out: np.ndarray | None = None) -> np.ndarray:
        """Dense H(t) on the joint space."""
        if out is None:
            out = np.empty_like(self.static)
        np.multiply(self.number, self.protocol.value(t), out=out)
        out += self.static
        q = self.casimir_coefficient(t)
        if q != 0.0:
            out += q * self.squeeze
        return out


def assemble_hamiltonian(
    ops: OperatorSet,
    params: SystemParams,
    protocol: DriveProtocol,
    terms: TermSelection,
    t: float,
) -> np.ndarray:
    """One-shot H(t); precompute HamiltonianTerms instead for hot loops."""
    return HamiltonianTerms(ops, params, protocol, terms).at(t)


# --------------------------------------------------------------------------
# stationary (dressed) eigenstate helpers


def dressed_state(hamiltonian: np.ndarray, like_index: int) -> tuple[np.ndarray, float]:
    """Eigenvector of H with the largest overlap on one bare basis state.

    Returns (vector, eigenvalue). Useful for preparing the interacting
    ground state and for projecting onto the stationary excited state after
    a frequency switch.
    """
    energies, vectors = np.linalg.eigh(hamiltonian)
    weights = np.abs(vectors[like_index, :]) ** 2
    k = int(np.argmax(weights))
    return vectors[:, k].copy(), float(energies[k])


def dressed_excitation(
    ops: OperatorSet, hamiltonian: np.ndarray, rho: np.ndarray
) -> float:
    """Population of qubit-excited-like eigenstates of a stationary H.

    Eigenstates whose weight on the qubit-excited block exceeds 1/2 count as
    excited; the result is the stationary-basis analogue of Tr[sigma+ sigma- rho].
    """
    _, vectors = np.linalg.eigh(hamiltonian)
    levels = ops.n_max + 1
    excited_weight = np.sum(np.abs(vectors[levels:, :]) ** 2, axis=0)
    populations = np.einsum("ik,ij,jk->k", vectors.conj(), rho, vectors).real
    return float(np.sum(populations[excited_weight > 0.5]))
