"""Closed-form benchmarks and the reduced photon-moment equations.

Three families of results serve as independent cross-checks on the full
density-matrix integration:

- single-switch qubit excitation probabilities, one for the
  photon-absorption route and one for the re-dressing route,
- the critical modulation amplitude of a bare lossy cavity,
- the closed two-moment ODE system (n, s) = (Tr[a'a rho], Tr[a^2 rho]) of
  the bare driven cavity, whose long-time growth/decay locates that
  critical amplitude numerically.

The moment equations follow from the adjoint master equation and close
exactly when no qubit is present:

    dn/dt = -kappa n - 4 q(t) Re s
    ds/dt = -(2 i w(t) + kappa) s - q(t) (4 n + 2),   q = (dw/dt) / 4w
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .hamiltonian import (
    Interaction,
    SwitchRamp,
    SystemParams,
    TermSelection,
    assemble_hamiltonian,
    dressed_state,
)
from .lindblad import IntegratorConfig, integrate, pure_density
from .observables import TerminationStatus
from .operators import build_operators

# The photon-absorption formula is a far-from-resonance expansion in
# g/(epsilon - omega2); within 3g of the resonance it is meaningless.
NEAR_RESONANCE_FACTOR = 3.0

# Moment trajectories above this photon number are called diverging; the
# subcritical fixed point at 10% below threshold is already < 10^2.
DIVERGENCE_GUARD = 1.0e6


class NearResonance(ValueError):
    """Switch formula evaluated too close to the qubit-cavity resonance."""


class MomentStatus(enum.Enum):
    COMPLETED = "completed"
    DIVERGING = "diverging"


@dataclass(frozen=True)
class SwitchSpec:
    """A single cavity frequency switch omega1 -> omega2."""

    omega1: float
    omega2: float
    epsilon: float
    g: float

    def __post_init__(self):
        for name in ("omega1", "omega2", "epsilon", "g"):
            value = getattr(self, name)
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")


def w_casimir(spec: SwitchSpec) -> float:
    """Excitation probability via absorption of a switch-generated photon.

    Valid far from the qubit/post-switch-cavity resonance; raises
    NearResonance inside |epsilon - omega2| < 3g where the perturbative
    denominator breaks down.
    """
    gap = spec.epsilon - spec.omega2
    if abs(gap) < NEAR_RESONANCE_FACTOR * spec.g:
        raise NearResonance(
            f"|epsilon - omega2| = {abs(gap):.4g} < {NEAR_RESONANCE_FACTOR}*g "
            f"= {NEAR_RESONANCE_FACTOR * spec.g:.4g}"
        )
    jump = spec.omega2 - spec.omega1
    return (spec.g**2 / gap**2) * jump**2 / (4.0 * spec.omega1 * spec.omega2)


def w_lamb(spec: SwitchSpec) -> float:
    """Excitation probability via re-dressing of the qubit ground state.

    Symmetric under omega1 <-> omega2 and free of the near-resonance
    restriction of w_casimir.
    """
    jump = spec.omega2 - spec.omega1
    return (
        spec.g**2
        * jump**2
        / ((spec.omega2 + spec.epsilon) ** 2 * (spec.omega1 + spec.epsilon) ** 2)
    )


def d_crit_res(omega0: float, Omega: float, kappa: float) -> float:
    """Modulation amplitude above which a bare lossy cavity never saturates.

    At Omega = 2*omega0 this reduces to kappa exactly; detuning from the
    parametric resonance raises the threshold.
    """
    if Omega <= 0:
        raise ValueError(f"Omega must be positive, got {Omega}")
    if omega0 <= 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    return (2.0 * omega0 / Omega) * math.hypot(kappa, Omega - 2.0 * omega0)


# --------------------------------------------------------------------------
# reduced moment dynamics of the bare cavity


@dataclass(frozen=True)
class MomentState:
    """Photon number and pair-fluctuation amplitude of the cavity mode."""

    n: float = 0.0
    s: complex = 0.0j

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")


@dataclass
class MomentTrajectory:
    t: np.ndarray
    n: np.ndarray
    s: np.ndarray
    status: MomentStatus

    @property
    def final(self) -> MomentState:
        return MomentState(n=float(self.n[-1]), s=complex(self.s[-1]))


def integrate_moments(
    omega0: float,
    d: float,
    Omega: float,
    kappa: float,
    state0: MomentState | None = None,
    t_end: float = 2000.0,
    samples: int = 2001,
    rel_tol: float = 1.0e-9,
    abs_tol: float = 1.0e-12,
) -> MomentTrajectory:
    """Integrate the closed (n, s) system of the modulated bare cavity.

    Vacuum is not a fixed point: the s equation has the inhomogeneous pump
    term -2q(t), which is how photons appear from nothing. Integration
    stops with status DIVERGING once n exceeds DIVERGENCE_GUARD (expected
    above the critical amplitude).
    """
    if not 0 <= d < omega0:
        raise ValueError(f"need 0 <= d < omega0, got d={d}")
    if Omega <= 0 or kappa < 0:
        raise ValueError("Omega must be positive and kappa >= 0")
    if state0 is None:
        state0 = MomentState()

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        w = omega0 + d * math.cos(Omega * t)
        q = -d * Omega * math.sin(Omega * t) / (4.0 * w)
        n, sr, si = y
        return np.array(
            [
                -kappa * n - 4.0 * q * sr,
                -kappa * sr + 2.0 * w * si - q * (4.0 * n + 2.0),
                -kappa * si - 2.0 * w * sr,
            ]
        )

    def blown_up(t: float, y: np.ndarray) -> float:
        return y[0] - DIVERGENCE_GUARD

    blown_up.terminal = True
    blown_up.direction = 1.0

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        np.array([state0.n, state0.s.real, state0.s.imag]),
        method="RK45",
        t_eval=np.linspace(0.0, t_end, samples),
        rtol=rel_tol,
        atol=abs_tol,
        events=blown_up,
        max_step=2.0 * math.pi / Omega / 4.0,
    )
    status = MomentStatus.DIVERGING if sol.status == 1 else MomentStatus.COMPLETED
    return MomentTrajectory(
        t=sol.t,
        n=sol.y[0],
        s=sol.y[1] + 1j * sol.y[2],
        status=status,
    )


def moments_grow(
    omega0: float,
    d: float,
    Omega: float,
    kappa: float,
    t_end: float = 8000.0,
    growth_margin: float = 1.05,
    rel_tol: float = 1.0e-7,
    abs_tol: float = 1.0e-10,
) -> bool:
    """Classify a drive as supercritical from the long-time moment dynamics.

    True if the integration hits the divergence guard or the mean photon
    number over the last quarter exceeds the previous quarter by the
    growth margin. Near threshold both growth and settling slow down like
    1/|d - d_crit|, so t_end bounds the resolvable margin (default
    resolves ~5% at kappa = 0.01). Tolerances are looser than the
    trajectory default because only the growth sign matters here.
    """
    traj = integrate_moments(
        omega0, d, Omega, kappa, t_end=t_end, rel_tol=rel_tol, abs_tol=abs_tol
    )
    if traj.status is MomentStatus.DIVERGING:
        return True
    third = traj.t >= 0.50 * t_end
    fourth = traj.t >= 0.75 * t_end
    earlier = traj.n[third & ~fourth].mean()
    later = traj.n[fourth].mean()
    if earlier <= 0:
        return False
    return bool(later > growth_margin * earlier)


def moment_threshold(
    omega0: float,
    Omega: float,
    kappa: float,
    d_lo: float = 0.0,
    d_hi: float | None = None,
    rel_precision: float = 0.01,
    t_end: float = 8000.0,
) -> float:
    """Bisect the growth/decay boundary of the moment dynamics in d.

    The default bracket spans [0, 3x] the closed-form threshold; if the
    caller supplies a bracket it must actually bracket (lo stable, hi
    growing).
    """
    if d_hi is None:
        d_hi = min(3.0 * d_crit_res(omega0, Omega, kappa), 0.9 * omega0)
    if d_lo < 0 or d_hi <= d_lo:
        raise ValueError(f"invalid bracket [{d_lo}, {d_hi}]")
    if d_lo > 0 and moments_grow(omega0, d_lo, Omega, kappa, t_end=t_end):
        raise ValueError(f"lower bracket d={d_lo} already grows")
    if not moments_grow(omega0, d_hi, Omega, kappa, t_end=t_end):
        raise ValueError(f"upper bracket d={d_hi} does not grow")
    while (d_hi - d_lo) > rel_precision * d_hi:
        mid = 0.5 * (d_lo + d_hi)
        if moments_grow(omega0, mid, Omega, kappa, t_end=t_end):
            d_hi = mid
        else:
            d_lo = mid
    return 0.5 * (d_lo + d_hi)


# --------------------------------------------------------------------------
# brute-force counterpart of the switch formulas


def switch_excitation_probability(
    spec: SwitchSpec,
    interaction: Interaction,
    n_max: int = 8,
    tau: float = 0.02 * math.pi,
    window: tuple[float, float] = (5.0, 50.0),
    rel_tol: float = 1.0e-8,
    abs_tol: float = 1.0e-11,
) -> float:
    """Time-averaged dressed excitation after one dissipation-free switch.

    Prepares the interacting ground state of the pre-switch system, ramps
    the cavity frequency omega1 -> omega2 over tau, then averages the
    population of qubit-excited-like stationary states over the window
    (given in units of the coherent exchange time pi/g) after the ramp.
    This is the quantity the perturbative switch formulas estimate; bare
    Tr[sigma+ sigma- rho] differs from it at the same order as the result.
    """
    params = SystemParams(
        omega0=spec.omega1, epsilon=spec.epsilon, g=spec.g
    )
    terms = TermSelection(include_casimir=True, interaction=interaction)
    ops = build_operators(n_max)
    t_switch = max(20.0 * tau, 1.0)
    ramp = SwitchRamp(
        omega1=spec.omega1, omega2=spec.omega2, t_switch=t_switch, tau=tau
    )
    t_rabi = math.pi / spec.g
    t_end = t_switch + window[1] * t_rabi
    h0 = assemble_hamiltonian(ops, params, ramp, terms, 0.0)
    ground, _ = dressed_state(h0, ops.basis_index("g", 0))
    config = IntegratorConfig(
        t_end=t_end,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        sample_interval=t_rabi / 64.0,
        store_states=True,
        compute_eigenvalues=False,
    )
    traj = integrate(ops, params, ramp, terms, pure_density(ground), config)
    if traj.status is not TerminationStatus.COMPLETED:
        raise RuntimeError(f"switch run ended with status {traj.status.value}")

    h1 = assemble_hamiltonian(ops, params, ramp, terms, t_end)
    _, vectors = np.linalg.eigh(h1)
    levels = ops.n_max + 1
    excited = np.sum(np.abs(vectors[levels:, :]) ** 2, axis=0) > 0.5
    lo = t_switch + window[0] * t_rabi
    keep = traj.t >= lo
    states = np.asarray(traj.states)[keep]
    populations = np.einsum(
        "ik,tij,jk->tk", vectors.conj(), states, vectors
    ).real
    return float(populations[:, excited].sum(axis=1).mean())
