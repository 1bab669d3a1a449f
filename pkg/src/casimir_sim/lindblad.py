"""Master-equation right-hand side and adaptive integration.

d rho / dt = -i [H(t), rho] + kappa D[a] rho + gamma D[sigma-] rho
             + gamma_phi (sigma_z rho sigma_z - rho),

with D[L] rho = L rho L' - {L'L, rho}/2. The state is a dense density
matrix on the joint qubit-photon space. Integration uses an explicit
embedded Dormand-Prince 5(4) pair in the lab frame with:

  * re-hermitization of rho after every accepted step,
  * trace monitored (never renormalized) with early stop on drift,
  * early stop when the top Fock level accumulates population, so a
    truncation breach is reported instead of silently corrupting results,
  * eigenvalue (positivity) tracking at sample cadence.

The hot-loop right-hand side exploits hermiticity: G rho + (G rho)' with
G = -iH - (kappa/2) a'a - (gamma/2) sigma+sigma- reproduces the commutator
and anticommutator parts in one matrix product, and the jump terms reduce
to shifted or masked elementwise products. rhs() provides the plain
textbook form; the two are verified against each other in the tests.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .hamiltonian import (
    Constant,
    Cosine,
    DriveProtocol,
    HamiltonianTerms,
    SwitchRamp,
    SystemParams,
    TermSelection,
    assemble_hamiltonian,
)
from .observables import TerminationStatus, Trajectory
from .operators import OperatorSet

DEFAULT_DT_MAX = 0.02 * 2.0 * math.pi  # resolves the omega0 = 1 timescale
DEFAULT_SAMPLE_INTERVAL = 2.0 * math.pi / 20.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, step bounds and guard thresholds for integrate()."""

    t_end: float
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    dt_initial: float = 1e-3
    dt_max: float = DEFAULT_DT_MAX
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL
    positivity_tol: float = 1e-7
    trace_tol: float = 1e-6
    top_level_guard: float = 1e-3
    store_states: bool = False
    compute_eigenvalues: bool = True

    def __post_init__(self):
        for name in (
            "t_end",
            "rel_tol",
            "abs_tol",
            "dt_initial",
            "dt_max",
            "sample_interval",
            "positivity_tol",
            "trace_tol",
            "top_level_guard",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.sample_interval > self.t_end:
            raise ValueError("sample_interval must not exceed t_end")


# --------------------------------------------------------------------------
# states


def pure_density(vec: np.ndarray) -> np.ndarray:
    """Density matrix |vec><vec| of a normalized state vector."""
    vec = np.asarray(vec, dtype=np.complex128)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("state vector must be nonzero")
    vec = vec / norm
    return np.outer(vec, vec.conj())


def ground_vacuum(ops: OperatorSet) -> np.ndarray:
    """Default initial state |g, 0><g, 0|."""
    return pure_density(ops.basis_vector("g", 0))


def validate_density_matrix(
    rho: np.ndarray,
    trace_tol: float = 1e-6,
    positivity_tol: float = 1e-7,
    herm_tol: float = 1e-9,
) -> None:
    """Raise ValueError unless rho is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"rho must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho.view(np.float64))):
        raise ValueError("rho contains non-finite entries")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"rho deviates from hermitian by {herm:.3g}")
    tr = rho.trace().real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace(rho) = {tr!r} deviates from 1")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -positivity_tol:
        raise ValueError(f"rho has negative eigenvalue {min_eig:.3g}")


# --------------------------------------------------------------------------
# reference right-hand side (readable form)


def dissipator(ops: OperatorSet, params: SystemParams, rho: np.ndarray) -> np.ndarray:
    """Photon-loss, qubit-relaxation and pure-dephasing channels."""
    out = np.zeros_like(rho)
    if params.kappa:
        na = ops.n_op
        out += params.kappa * (
            ops.a @ rho @ ops.a_dag - 0.5 * (na @ rho + rho @ na)
        )
    if params.gamma:
        pe = ops.sigma_plus @ ops.sigma_minus
        out += params.gamma * (
            ops.sigma_minus @ rho @ ops.sigma_plus - 0.5 * (pe @ rho + rho @ pe)
        )
    if params.gamma_phi:
        # pure dephasing with jump operator sigma_z/2: qubit coherences decay
        # at gamma_phi/2 while populations are untouched
        out += 0.25 * params.gamma_phi * (ops.sigma_z @ rho @ ops.sigma_z - rho)
    return out


def rhs(
    ops: OperatorSet,
    params: SystemParams,
    protocol: DriveProtocol,
    terms: TermSelection,
    t: float,
    rho: np.ndarray,
) -> np.ndarray:
    """Full master-equation right-hand side at time t (reference form)."""
    h = assemble_hamiltonian(ops, params, protocol, terms, t)
    return -1j * (h @ rho - rho @ h) + dissipator(ops, params, rho)


# --------------------------------------------------------------------------
# fused right-hand side for the integrator


class _FusedRhs:
    """Optimized Lindblad RHS; output is hermitian for hermitian input."""

    def __init__(
        self,
        ops: OperatorSet,
        params: SystemParams,
        protocol: DriveProtocol,
        terms: TermSelection,
    ):
        dim = ops.dim
        levels = ops.n_max + 1
        self._levels = levels
        self._protocol = protocol
        self._include_casimir = terms.include_casimir
        pe = ops.sigma_plus @ ops.sigma_minus
        hterms = HamiltonianTerms(ops, params, protocol, terms)
        self._g_static = (
            -1j * hterms.static
            - 0.5 * params.kappa * ops.n_op
            - 0.5 * params.gamma * pe
        )
        self._g_number = -1j * ops.n_op
        self._g_squeeze = -1j * hterms.squeeze  # = a^2 - a'^2
        self._kappa = params.kappa
        self._gamma = params.gamma
        self._gamma_phi = params.gamma_phi
        # photon jump: (a rho a')[i, j] = w_i w_j rho[i+1, j+1], with w = 0 at
        # each qubit block top so the shift never crosses block boundaries.
        w = np.sqrt(ops.fock_levels + 1.0)
        w[levels - 1] = 0.0
        w[2 * levels - 1] = 0.0
        self._jump_weights = (params.kappa * np.outer(w, w))[:-1, :-1].astype(
            np.complex128
        )
        # dephasing jump operator sigma_z/2: same-block entries untouched,
        # cross-block entries decay at gamma_phi/2.
        sign = np.where(np.arange(dim) >= levels, 1.0, -1.0)
        mask = np.outer(sign, sign) - 1.0
        self._dephase = (0.25 * params.gamma_phi * mask).astype(np.complex128)
        self._g = np.empty((dim, dim), dtype=np.complex128)
        self._t1 = np.empty((dim, dim), dtype=np.complex128)
        self._t2 = np.empty((dim, dim), dtype=np.complex128)
        self._jbuf = np.empty((dim - 1, dim - 1), dtype=np.complex128)
        self._gbuf = np.empty((levels, levels), dtype=np.complex128)

    def __call__(self, t: float, rho: np.ndarray, out: np.ndarray) -> np.ndarray:
        g = self._g
        protocol = self._protocol
        np.multiply(self._g_number, protocol.value(t), out=g)
        g += self._g_static
        if self._include_casimir:
            q = protocol.derivative(t) / (4.0 * protocol.value(t))
            if q != 0.0:
                np.multiply(self._g_squeeze, q, out=self._t2)
                g += self._t2
        np.matmul(g, rho, out=self._t1)
        np.conjugate(self._t1, out=self._t2)
        np.add(self._t1, self._t2.T, out=out)
        lv = self._levels
        if self._kappa:
            np.multiply(self._jump_weights, rho[1:, 1:], out=self._jbuf)
            out[:-1, :-1] += self._jbuf
        if self._gamma:
            np.multiply(rho[lv:, lv:], self._gamma, out=self._gbuf)
            out[:lv, :lv] += self._gbuf
        if self._gamma_phi:
            np.multiply(self._dephase, rho, out=self._t2)
            out += self._t2
        return out


# --------------------------------------------------------------------------
# Dormand-Prince 5(4) with FSAL

_DP_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0)
_DP_A = tuple(
    np.array(row, dtype=np.complex128)
    for row in (
        [0.2],
        [3.0 / 40.0, 9.0 / 40.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        ],
    )
)
_DP_B5 = np.array(
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    dtype=np.complex128,
)
_DP_ERR = np.array(
    [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ],
    dtype=np.complex128,
)

_MIN_STEP_FACTOR = 1e-13


def _drive_descriptor(protocol: DriveProtocol) -> dict:
    kind = {Constant: "constant", Cosine: "cosine", SwitchRamp: "switch"}[
        type(protocol)
    ]
    return {"kind": kind, **asdict(protocol)}


def _sample_boundaries(t_end: float, interval: float) -> np.ndarray:
    n_full = int(math.floor(t_end / interval + 1e-9))
    bounds = interval * np.arange(1, n_full + 1)
    if n_full == 0:
        return np.array([t_end])
    if t_end - bounds[-1] > 1e-6 * interval:
        bounds = np.append(bounds, t_end)
    else:
        bounds[-1] = t_end
    return bounds


def integrate(
    ops: OperatorSet,
    params: SystemParams,
    protocol: DriveProtocol,
    terms: TermSelection,
    rho0: np.ndarray | None,
    config: IntegratorConfig,
) -> Trajectory:
    """Integrate the master equation and sample observables.

    rho0 = None selects the default |g,0><g,0|. Returns a Trajectory whose
    status records normal completion or the guard that stopped the run; on
    an early stop the samples collected so far (plus one at the stop time)
    are returned rather than raised away.
    """
    if rho0 is None:
        rho0 = ground_vacuum(ops)
        initial_state = "ground_vacuum"
    else:
        validate_density_matrix(
            rho0, trace_tol=config.trace_tol, positivity_tol=config.positivity_tol
        )
        initial_state = "custom"
    dim = ops.dim
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 has shape {rho0.shape}, expected {(dim, dim)}")
    levels = ops.n_max + 1

    fused = _FusedRhs(ops, params, protocol, terms)
    y = np.array(rho0, dtype=np.complex128, order="C")
    y = 0.5 * (y + y.conj().T)
    yf = y.reshape(-1)
    k = np.empty((7, dim, dim), dtype=np.complex128)
    kf = k.reshape(7, -1)
    y_try = np.empty_like(y)
    ytf = y_try.reshape(-1)
    stage = np.empty_like(y)
    stf = stage.reshape(-1)
    err_vec = np.empty_like(yf)
    herm = np.empty_like(y)

    bounds = _sample_boundaries(config.t_end, config.sample_interval)
    fock = ops.fock_levels

    t_s: list[float] = []
    w_s: list[float] = []
    n_s: list[float] = []
    p_s: list[float] = []
    tr_s: list[float] = []
    top_s: list[float] = []
    eig_s: list[float] = []
    states: list[np.ndarray] | None = [] if config.store_states else None

    def record(t_now: float):
        d = np.einsum("ii->i", y)
        t_s.append(t_now)
        w_s.append(float(d[levels:].sum().real))
        n_s.append(float((d.real * fock).sum()))
        p_s.append(float(np.vdot(yf, yf).real))
        tr_s.append(float(d.sum().real - 1.0))
        top_s.append(float(d[levels - 1].real + d[-1].real))
        if config.compute_eigenvalues:
            eig_s.append(float(np.linalg.eigvalsh(y)[0]))
        if states is not None:
            states.append(y.copy())

    t = 0.0
    record(t)
    fused(t, y, out=k[0])
    dt_prop = min(config.dt_initial, config.dt_max, bounds[0])
    status = None
    bi = 0
    n_accept = 0
    n_reject = 0

    while status is None:
        target = float(bounds[bi])
        dt = min(dt_prop, config.dt_max, target - t)
        hitting = dt >= target - t - 1e-14 * max(1.0, target)
        if hitting:
            dt = target - t
        # stages 2..6
        for i in range(5):
            np.matmul(_DP_A[i], kf[: i + 1], out=err_vec[: dim * dim])
            np.multiply(err_vec, dt, out=stf)
            stf += yf
            fused(t + _DP_C[i] * dt, stage, out=k[i + 1])
        # 5th-order solution, then FSAL stage
        np.matmul(_DP_B5, kf[:6], out=ytf)
        ytf *= dt
        ytf += yf
        fused(t + dt, y_try, out=k[6])
        np.matmul(_DP_ERR, kf, out=err_vec)
        err_vec *= dt
        scale = config.abs_tol + config.rel_tol * np.maximum(
            np.abs(yf), np.abs(ytf)
        )
        err = math.sqrt(float(np.mean((np.abs(err_vec) / scale) ** 2)))
        if not math.isfinite(err):
            err = 10.0
        if err <= 1.0:
            n_accept += 1
            t = target if hitting else t + dt
            yf[:] = ytf
            # re-hermitize each accepted step (construction keeps rho
            # hermitian to the bit, so this is a cheap safety net)
            np.conjugate(y.T, out=herm)
            y += herm
            y *= 0.5
            k[0][:] = k[6]
            d = np.einsum("ii->i", y)
            if not np.all(np.isfinite(y.view(np.float64))):
                status = TerminationStatus.NON_FINITE
                break
            trace_dev = float(d.sum().real - 1.0)
            top_pop = float(d[levels - 1].real + d[-1].real)
            stop = None
            if abs(trace_dev) > config.trace_tol:
                stop = TerminationStatus.TRACE_DRIFT
            elif top_pop > config.top_level_guard:
                stop = TerminationStatus.TRUNCATION_BREACH
            if stop is not None:
                if t - t_s[-1] > 1e-12:
                    record(t)
                status = stop
                break
            if hitting:
                record(t)
                bi += 1
                if bi == len(bounds):
                    status = TerminationStatus.COMPLETED
                    break
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            dt_prop = min(dt * factor, config.dt_max)
        else:
            n_reject += 1
            dt_prop = dt * max(0.2, min(0.9, 0.9 * err ** -0.2))
            if dt_prop < _MIN_STEP_FACTOR * max(1.0, abs(t)):
                status = TerminationStatus.NON_FINITE
                break

    metadata = {
        "params": asdict(params),
        "drive": _drive_descriptor(protocol),
        "terms": {
            "include_casimir": terms.include_casimir,
            "interaction": terms.interaction.value,
        },
        "n_max": ops.n_max,
        "initial_state": initial_state,
        "integrator": "dormand-prince-5(4), adaptive, re-hermitized each step",
        "config": asdict(config),
        "n_accepted": n_accept,
        "n_rejected": n_reject,
    }
    return Trajectory(
        t=np.array(t_s),
        w_e=np.array(w_s),
        n_ph=np.array(n_s),
        purity=np.array(p_s),
        trace_dev=np.array(tr_s),
        top_fock_pop=np.array(top_s),
        min_eig=np.array(eig_s) if config.compute_eigenvalues else None,
        status=status,
        metadata=metadata,
        states=states,
    )
