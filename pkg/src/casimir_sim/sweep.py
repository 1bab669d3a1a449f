"""Families of independent integrations over one parameter axis.

A sweep varies exactly one scalar (drive frequency, drive amplitude, or a
dissipation rate) while holding the rest of the run configuration fixed,
and tabulates the steady-state envelope of each point. Points are fully
independent, so the pool parallelism cannot change any numbers: results
are bitwise identical for any worker count.
"""

from __future__ import annotations

import dataclasses
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hamiltonian import Cosine, DriveProtocol, SystemParams, TermSelection
from .lindblad import IntegratorConfig, integrate
from .observables import (
    MIN_WINDOW_SAMPLES,
    Envelope,
    TerminationStatus,
    steady_envelope,
)
from .operators import build_operators

AXES = ("Omega", "d", "gamma", "kappa", "gamma_phi", "epsilon")

# axis -> which object carries it
_DRIVE_AXES = ("Omega", "d")


@dataclass(frozen=True)
class RunSetup:
    """Everything one integration needs; cheap to ship to worker processes.

    Operator matrices are rebuilt inside each worker from n_max rather
    than pickled.
    """

    params: SystemParams
    protocol: DriveProtocol
    terms: TermSelection
    config: IntegratorConfig
    n_max: int
    rho0: np.ndarray | None = None


@dataclass(frozen=True)
class SweepSpec:
    base: RunSetup
    axis: str
    values: tuple[float, ...]
    workers: int = 1

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("values must be nonempty")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", values)
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.axis in _DRIVE_AXES and not isinstance(self.base.protocol, Cosine):
            raise ValueError(
                f"axis {self.axis!r} requires a cosine drive, got "
                f"{type(self.base.protocol).__name__}"
            )


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one sweep point; envelope is None when the run breached."""

    value: float
    envelope: Envelope | None
    status: TerminationStatus
    wall_time: float


@dataclass(frozen=True)
class SweepTable:
    axis: str
    rows: tuple[SweepRow, ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([row.value for row in self.rows])

    def column(self, name: str) -> np.ndarray:
        """Envelope field as an array, NaN where a point has no envelope."""
        fields = {f.name for f in dataclasses.fields(Envelope)}
        if name not in fields:
            raise ValueError(f"unknown envelope column {name!r}; one of {sorted(fields)}")
        return np.array(
            [
                getattr(row.envelope, name) if row.envelope is not None else np.nan
                for row in self.rows
            ]
        )


def _with_value(base: RunSetup, axis: str, value: float) -> RunSetup:
    if axis in _DRIVE_AXES:
        protocol = dataclasses.replace(base.protocol, **{axis: value})
        return dataclasses.replace(base, protocol=protocol)
    params = dataclasses.replace(base.params, **{axis: value})
    return dataclasses.replace(base, params=params)


def _run_point(task: tuple[RunSetup, str, float]) -> SweepRow:
    base, axis, value = task
    setup = _with_value(base, axis, value)
    start = time.perf_counter()
    ops = build_operators(setup.n_max)
    traj = integrate(
        ops, setup.params, setup.protocol, setup.terms, setup.rho0, setup.config
    )
    envelope = None
    if traj.status is TerminationStatus.COMPLETED:
        envelope = steady_envelope(traj)
        if not envelope.stabilized:
            # one retry with doubled horizon before reporting unstabilized
            config = dataclasses.replace(setup.config, t_end=2.0 * setup.config.t_end)
            retry = integrate(
                ops, setup.params, setup.protocol, setup.terms, setup.rho0, config
            )
            traj = retry
            envelope = (
                steady_envelope(retry)
                if retry.status is TerminationStatus.COMPLETED
                else None
            )
    return SweepRow(
        value=value,
        envelope=envelope,
        status=traj.status,
        wall_time=time.perf_counter() - start,
    )


def _limit_blas_threads() -> None:
    for name in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(name, "1")


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Integrate every point of the sweep, never aborting on point failures.

    The environment variable CASIMIR_SIM_THREADS caps the worker count.
    Rows preserve the requested value order. Wall times are informational
    and are the only nondeterministic field.
    """
    # Fail fast on a sampling grid too coarse for the trailing-window
    # analysis: otherwise every completed row would die in steady_envelope.
    config = spec.base.config
    estimated = int(config.t_end / config.sample_interval) + 1
    if estimated < 4 * MIN_WINDOW_SAMPLES:
        raise ValueError(
            f"t_end/sample_interval yields about {estimated} samples; the "
            f"envelope window needs at least {4 * MIN_WINDOW_SAMPLES}"
        )
    workers = spec.workers
    cap = os.environ.get("CASIMIR_SIM_THREADS")
    if cap is not None:
        workers = max(1, min(workers, int(cap)))
    tasks = [(spec.base, spec.axis, value) for value in spec.values]
    if workers == 1:
        rows = [_run_point(task) for task in tasks]
    else:
        _limit_blas_threads()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_point, tasks))
    return SweepTable(axis=spec.axis, rows=tuple(rows))


def peak_positions(values: np.ndarray, heights: np.ndarray) -> tuple[float, ...]:
    """Refined positions of strict interior local maxima of a sampled curve.

    Each local maximum is sharpened by the vertex of the parabola through
    it and its two neighbors; a degenerate (non-concave) fit falls back to
    the grid point itself.
    """
    v = np.asarray(values, dtype=float)
    h = np.asarray(heights, dtype=float)
    if v.shape != h.shape or v.ndim != 1:
        raise ValueError("values and heights must be 1-d arrays of equal length")
    if len(v) < 3:
        raise ValueError("need at least three samples to locate a peak")
    if not np.all(np.diff(v) > 0):
        raise ValueError("values must be strictly increasing")
    out = []
    for i in range(1, len(v) - 1):
        if h[i] > h[i - 1] and h[i] > h[i + 1]:
            a, b, _ = np.polyfit(v[i - 1 : i + 2], h[i - 1 : i + 2], 2)
            out.append(float(-b / (2.0 * a)) if a < 0 else float(v[i]))
    return tuple(out)
