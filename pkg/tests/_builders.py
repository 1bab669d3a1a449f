"""Shared builders for integration-backed tests."""

import math

import pytest

from casimir_sim import (
    Cosine,
    IntegratorConfig,
    Interaction,
    SystemParams,
    TermSelection,
)


def make_params(**overrides) -> SystemParams:
    """Zero-detuning system at the standard operating point."""
    values = dict(
        omega0=1.0, epsilon=1.0, g=0.05, kappa=0.01, gamma=0.05, gamma_phi=0.05
    )
    values.update(overrides)
    return SystemParams(**values)


def make_config(t_end: float, **overrides) -> IntegratorConfig:
    values = dict(
        t_end=t_end,
        rel_tol=1e-6,
        abs_tol=1e-9,
        sample_interval=math.pi / 10.0,
    )
    values.update(overrides)
    return IntegratorConfig(**values)


def make_drive(d: float = 0.01, Omega: float = 2.0, omega0: float = 1.0) -> Cosine:
    return Cosine(omega0=omega0, d=d, Omega=Omega)


def terms_for(interaction: Interaction, casimir: bool = True) -> TermSelection:
    return TermSelection(include_casimir=casimir, interaction=interaction)
