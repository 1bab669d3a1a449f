"""Trajectory containers and steady-state / ripple analysis.

A Trajectory stores sampled scalar observables of the density matrix on a
uniform time grid (plus a possible final off-grid sample when integration
stops early). Analysis helpers operate on the trailing window of a
trajectory: envelope extraction with a stabilization verdict, and the
amplitude of the fast ripple riding on the slow dynamics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class TerminationStatus(enum.Enum):
    COMPLETED = "completed"
    TRUNCATION_BREACH = "truncation_breach"
    TRACE_DRIFT = "trace_drift"
    NON_FINITE = "non_finite"


class TooShort(ValueError):
    """Not enough samples in the analysis window."""


class InsufficientSampling(ValueError):
    """Sample spacing too coarse to resolve the requested band."""


@dataclass(frozen=True)
class Sample:
    """Observables of rho at one instant."""

    t: float
    w_e: float
    n_ph: float
    purity: float
    trace_dev: float
    top_fock_pop: float


@dataclass
class Trajectory:
    """Sampled observables of one integration run."""

    t: np.ndarray
    w_e: np.ndarray
    n_ph: np.ndarray
    purity: np.ndarray
    trace_dev: np.ndarray
    top_fock_pop: np.ndarray
    status: TerminationStatus
    min_eig: np.ndarray | None = None
    metadata: dict[str, Any] = field(default_factory=dict)
    states: list[np.ndarray] | None = None

    def __post_init__(self):
        if len(self.t) == 0:
            raise ValueError("trajectory must contain at least one sample")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    def sample(self, i: int) -> Sample:
        return Sample(
            t=float(self.t[i]),
            w_e=float(self.w_e[i]),
            n_ph=float(self.n_ph[i]),
            purity=float(self.purity[i]),
            trace_dev=float(self.trace_dev[i]),
            top_fock_pop=float(self.top_fock_pop[i]),
        )


@dataclass(frozen=True)
class Envelope:
    """Trailing-window summary of a trajectory."""

    w_e_min: float
    w_e_max: float
    n_ph_mean: float
    stabilized_w_e: bool
    stabilized_n_ph: bool
    window: tuple[float, float]

    @property
    def stabilized(self) -> bool:
        return self.stabilized_w_e and self.stabilized_n_ph


MIN_WINDOW_SAMPLES = 50


def _window_indices(t: np.ndarray, window_fraction: float) -> np.ndarray:
    if not 0 < window_fraction <= 1:
        raise ValueError(f"window_fraction must be in (0, 1], got {window_fraction}")
    span = t[-1] - t[0]
    cut = t[-1] - window_fraction * span
    idx = np.nonzero(t >= cut)[0]
    if len(idx) < MIN_WINDOW_SAMPLES:
        raise TooShort(
            f"analysis window holds {len(idx)} samples; "
            f"need at least {MIN_WINDOW_SAMPLES}"
        )
    return idx


def _half_means_settled(x: np.ndarray, drift_tol: float) -> bool:
    half = len(x) // 2
    m1 = float(np.mean(x[:half]))
    m2 = float(np.mean(x[half:]))
    scale = max(abs(m1), abs(m2))
    if scale == 0.0:
        return True
    return abs(m2 - m1) / scale < drift_tol


def steady_envelope(
    traj: Trajectory, window_fraction: float = 0.25, drift_tol: float = 0.05
) -> Envelope:
    """Envelope of w_e and mean photon number over the trailing window.

    A signal counts as stabilized when the means of the two window halves
    agree within drift_tol (relative). Raises TooShort when the window holds
    fewer than MIN_WINDOW_SAMPLES samples.
    """
    idx = _window_indices(traj.t, window_fraction)
    w = traj.w_e[idx]
    n = traj.n_ph[idx]
    return Envelope(
        w_e_min=float(np.min(w)),
        w_e_max=float(np.max(w)),
        n_ph_mean=float(np.mean(n)),
        stabilized_w_e=_half_means_settled(w, drift_tol),
        stabilized_n_ph=_half_means_settled(n, drift_tol),
        window=(float(traj.t[idx[0]]), float(traj.t[idx[-1]])),
    )


def _detrended_residual(
    traj: Trajectory, band_center: float, window_fraction: float
) -> tuple[np.ndarray, np.ndarray]:
    """Trailing-window w_e with the slow trend removed; returns (t, residual)."""
    if band_center <= 0:
        raise ValueError(f"band_center must be positive, got {band_center}")
    idx = _window_indices(traj.t, window_fraction)
    t = traj.t[idx]
    x = traj.w_e[idx]
    dt = float(np.median(np.diff(t)))
    if dt > (2.0 * math.pi / band_center) / 10.0:
        raise InsufficientSampling(
            f"sample spacing {dt:.4g} resolves fewer than 10 points per "
            f"2*pi/band_center = {2.0 * math.pi / band_center:.4g}"
        )
    # Detrend with a boxcar one modulation period wide: it cancels the ripple
    # from the trend while keeping the slow envelope.
    drive = traj.metadata.get("drive", {})
    period = 2.0 * math.pi / float(drive.get("Omega", band_center))
    width = max(3, int(round(period / dt)))
    if len(x) < 3 * width:
        raise TooShort(
            f"window of {len(x)} samples is too short for a detrend width "
            f"of {width} samples"
        )
    trend = np.convolve(x, np.full(width, 1.0 / width), mode="same")
    residual = x - trend
    margin = width // 2 + 1
    return t[margin:-margin], residual[margin:-margin]


def fast_oscillation_amplitude(
    traj: Trajectory, band_center: float, window_fraction: float = 0.25
) -> float:
    """Half peak-to-peak amplitude of the fast w_e ripple near band_center."""
    _, residual = _detrended_residual(traj, band_center, window_fraction)
    return 0.5 * float(np.max(residual) - np.min(residual))


def fourier_ripple_amplitude(
    traj: Trajectory, band_center: float, window_fraction: float = 0.25
) -> float:
    """Independent ripple estimate: discrete Fourier magnitude at band_center.

    For a clean sinusoidal ripple this agrees with
    fast_oscillation_amplitude; the pair is used to cross-validate the
    detrending estimator.
    """
    t, residual = _detrended_residual(traj, band_center, window_fraction)
    phase = np.exp(-1j * band_center * t)
    return 2.0 * float(np.abs(np.mean(residual * phase)))
