"""Sweep orchestration: determinism, retries, and peak refinement."""

import math

import numpy as np
import pytest

from casimir_sim.hamiltonian import (
    Constant,
    Cosine,
    Interaction,
    SystemParams,
    TermSelection,
)
from casimir_sim.lindblad import IntegratorConfig, integrate
from casimir_sim.observables import TerminationStatus, steady_envelope
from casimir_sim.operators import build_operators
from casimir_sim.sweep import AXES, RunSetup, SweepSpec, peak_positions, run_sweep

TR = math.pi / 0.05


def _setup(t_end=4.0 * TR, n_max=6, gamma=0.05, kappa=0.01, d=0.01) -> RunSetup:
    params = SystemParams(
        omega0=1.0, epsilon=1.0, g=0.05, kappa=kappa, gamma=gamma, gamma_phi=gamma
    )
    config = IntegratorConfig(
        t_end=t_end, rel_tol=1e-6, abs_tol=1e-9, sample_interval=math.pi / 10.0
    )
    return RunSetup(
        params=params,
        protocol=Cosine(omega0=1.0, d=d, Omega=2.0),
        terms=TermSelection(),
        config=config,
        n_max=n_max,
    )


def _spec(values, axis="Omega", workers=1, **kw) -> SweepSpec:
    return SweepSpec(base=_setup(**kw), axis=axis, values=values, workers=workers)


# ---------------------------------------------------------------- validation


def test_spec_validation():
    with pytest.raises(ValueError):
        _spec((2.0,), axis="bogus")
    with pytest.raises(ValueError):
        _spec(())
    with pytest.raises(ValueError):
        _spec((2.0, math.nan))
    with pytest.raises(ValueError):
        _spec((2.0,), workers=0)


def test_drive_axes_need_a_modulated_protocol():
    base = _setup()
    base = RunSetup(
        params=base.params,
        protocol=Constant(omega=1.0),
        terms=base.terms,
        config=base.config,
        n_max=base.n_max,
    )
    with pytest.raises(ValueError):
        SweepSpec(base=base, axis="Omega", values=(2.0,), workers=1)
    # dissipation axes are fine without one
    SweepSpec(base=base, axis="gamma", values=(0.01,), workers=1)


def test_undersampled_config_rejected_up_front():
    base = _setup()
    coarse = RunSetup(
        params=base.params,
        protocol=base.protocol,
        terms=base.terms,
        config=IntegratorConfig(
            t_end=base.config.t_end, rel_tol=1e-6, abs_tol=1e-9,
            sample_interval=base.config.t_end / 10.0,
        ),
        n_max=base.n_max,
    )
    with pytest.raises(ValueError):
        run_sweep(SweepSpec(base=coarse, axis="Omega", values=(2.0,), workers=1))


# ---------------------------------------------------------------- execution


def test_sweep_rows_match_direct_integration():
    values = (1.95, 2.05)
    table = run_sweep(_spec(values))
    assert table.axis == "Omega"
    assert np.array_equal(table.values, np.array(values))
    base = _setup()
    ops = build_operators(base.n_max)
    for row in table.rows:
        import dataclasses

        proto = dataclasses.replace(base.protocol, Omega=row.value)
        direct = integrate(ops, base.params, proto, base.terms, None, base.config)
        env = steady_envelope(direct)
        assert row.status is TerminationStatus.COMPLETED
        assert row.envelope.w_e_max == env.w_e_max
        assert row.envelope.n_ph_mean == env.n_ph_mean


def test_sweep_over_dissipation_axis():
    table = run_sweep(_spec((0.02, 0.1), axis="gamma"))
    w = table.column("w_e_max")
    assert w[0] > w[1]  # stronger qubit damping suppresses the excitation
    assert np.all(np.isfinite(w))


def test_results_independent_of_worker_count():
    values = (1.95, 2.0, 2.05)
    serial = run_sweep(_spec(values, workers=1))
    pooled = run_sweep(_spec(values, workers=2))
    for a, b in zip(serial.rows, pooled.rows):
        assert a.value == b.value
        assert a.status is b.status
        assert a.envelope == b.envelope  # bitwise: dataclass of floats


def test_repeat_runs_bitwise_identical():
    values = (1.95, 2.05)
    first = run_sweep(_spec(values))
    second = run_sweep(_spec(values))
    for a, b in zip(first.rows, second.rows):
        assert a.envelope == b.envelope and a.status is b.status


def test_thread_cap_env_variable(monkeypatch):
    monkeypatch.setenv("CASIMIR_SIM_THREADS", "1")
    capped = run_sweep(_spec((1.95, 2.05), workers=4))
    serial = run_sweep(_spec((1.95, 2.05), workers=1))
    for a, b in zip(capped.rows, serial.rows):
        assert a.envelope == b.envelope


def test_unstabilized_point_retried_at_doubled_horizon():
    # weak dissipation on resonance: 4 TR is still drifting, 8 TR settles
    peak = 2.0 + math.sqrt(2.0) * 0.05
    base = _setup(t_end=4.0 * TR, gamma=0.01, kappa=0.01)
    short = integrate(
        build_operators(base.n_max), base.params,
        type(base.protocol)(omega0=1.0, d=0.01, Omega=peak),
        base.terms, None, base.config,
    )
    assert not steady_envelope(short).stabilized  # retry precondition

    table = run_sweep(SweepSpec(base=base, axis="Omega", values=(peak,), workers=1))
    row = table.rows[0]
    assert row.status is TerminationStatus.COMPLETED
    assert row.envelope is not None and row.envelope.stabilized

    import dataclasses

    doubled = dataclasses.replace(base.config, t_end=2.0 * base.config.t_end)
    direct = integrate(
        build_operators(base.n_max), base.params,
        type(base.protocol)(omega0=1.0, d=0.01, Omega=peak),
        base.terms, None, doubled,
    )
    assert row.envelope == steady_envelope(direct)


def test_breached_point_reported_not_fatal():
    table = run_sweep(_spec((0.005, 0.08), axis="d", n_max=4))
    good, bad = table.rows
    assert good.status is TerminationStatus.COMPLETED
    assert bad.status is TerminationStatus.TRUNCATION_BREACH
    assert bad.envelope is None
    col = table.column("w_e_max")
    assert math.isnan(col[1]) and math.isfinite(col[0])


def test_column_name_validation():
    table = run_sweep(_spec((2.0,)))
    with pytest.raises(ValueError):
        table.column("not_a_field")


# ---------------------------------------------------------------- peak finding


def test_peak_positions_recovers_parabola_vertex():
    x = np.array([1.0, 2.0, 3.0])
    y = -((x - 2.0) ** 2)
    peaks = peak_positions(x, y)
    assert len(peaks) == 1
    assert peaks[0] == pytest.approx(2.0, abs=1e-9)


def test_peak_positions_two_separated_peaks():
    x = np.linspace(1.85, 2.15, 41)
    y = np.exp(-((x - 1.93) / 0.02) ** 2) + 0.8 * np.exp(-((x - 2.07) / 0.02) ** 2)
    peaks = peak_positions(x, y)
    assert len(peaks) == 2
    assert peaks[0] == pytest.approx(1.93, abs=1e-3)
    assert peaks[1] == pytest.approx(2.07, abs=1e-3)


def test_peak_positions_monotone_has_none():
    x = np.linspace(0.0, 1.0, 11)
    assert peak_positions(x, x) == ()
    assert peak_positions(x, -x) == ()


def test_peak_positions_validation():
    with pytest.raises(ValueError):
        peak_positions(np.array([1.0, 2.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        peak_positions(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        peak_positions(np.array([1.0, 2.0, 1.5]), np.array([0.0, 1.0, 0.0]))
