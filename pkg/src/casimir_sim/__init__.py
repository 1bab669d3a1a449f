"""Simulator for a superconducting qubit coupled to a frequency-modulated cavity.

Dense Lindblad integration of the joint qubit-photon density matrix, with
closed-form cross-checks for the parametric photon-generation threshold and
for qubit excitation produced by a single frequency switch.
"""

__version__ = "0.1.0"

from .analytic import (
    MomentState,
    MomentStatus,
    MomentTrajectory,
    NearResonance,
    SwitchSpec,
    d_crit_res,
    integrate_moments,
    moment_threshold,
    moments_grow,
    switch_excitation_probability,
    w_casimir,
    w_lamb,
)
from .hamiltonian import (
    Constant,
    Cosine,
    DriveProtocol,
    Interaction,
    SwitchRamp,
    SystemParams,
    TermSelection,
    assemble_hamiltonian,
    dressed_excitation,
    dressed_state,
    drive_derivative,
    drive_value,
)
from .lindblad import IntegratorConfig, dissipator, ground_vacuum, integrate, rhs
from .observables import (
    Envelope,
    Sample,
    TerminationStatus,
    Trajectory,
    fast_oscillation_amplitude,
    fourier_ripple_amplitude,
    steady_envelope,
)
from .operators import FockCutoff, OperatorSet, basis_index, build_operators
from .sweep import AXES, RunSetup, SweepRow, SweepSpec, SweepTable, peak_positions, run_sweep

__all__ = [
    "AXES",
    "Constant",
    "Cosine",
    "DriveProtocol",
    "Envelope",
    "FockCutoff",
    "IntegratorConfig",
    "Interaction",
    "MomentState",
    "MomentStatus",
    "MomentTrajectory",
    "NearResonance",
    "OperatorSet",
    "RunSetup",
    "Sample",
    "SweepRow",
    "SweepSpec",
    "SweepTable",
    "SwitchRamp",
    "SwitchSpec",
    "SystemParams",
    "TermSelection",
    "TerminationStatus",
    "Trajectory",
    "assemble_hamiltonian",
    "basis_index",
    "build_operators",
    "d_crit_res",
    "dissipator",
    "dressed_excitation",
    "dressed_state",
    "drive_derivative",
    "drive_value",
    "fast_oscillation_amplitude",
    "fourier_ripple_amplitude",
    "ground_vacuum",
    "integrate",
    "integrate_moments",
    "moment_threshold",
    "moments_grow",
    "peak_positions",
    "rhs",
    "run_sweep",
    "steady_envelope",
    "switch_excitation_probability",
    "w_casimir",
    "w_lamb",
    "__version__",
]
