"""Hamiltonian assembly, drive protocols, and dressed-state helpers."""

import math

import numpy as np
import pytest

from casimir_sim.hamiltonian import (
    Constant,
    Cosine,
    HamiltonianTerms,
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
from casimir_sim.operators import build_operators


# ---------------------------------------------------------------- parameters


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(omega0=0.0)
    with pytest.raises(ValueError):
        SystemParams(epsilon=-0.1)
    with pytest.raises(ValueError):
        SystemParams(g=-0.01)
    with pytest.raises(ValueError):
        SystemParams(kappa=-1e-9)
    with pytest.raises(ValueError):
        SystemParams(gamma=-1e-9)
    with pytest.raises(ValueError):
        SystemParams(gamma_phi=-1e-9)


def test_params_weak_regime_warning():
    with pytest.warns(UserWarning):
        SystemParams(g=0.25)
    with pytest.warns(UserWarning):
        Cosine(omega0=1.0, d=0.3, Omega=2.0)


def test_params_derived_quantities():
    p = SystemParams(omega0=1.0, epsilon=0.9, g=0.05)
    assert p.detuning == pytest.approx(-0.1)
    assert p.rabi_period == pytest.approx(math.pi / 0.05)
    assert SystemParams(g=0.0).rabi_period == math.inf


# ---------------------------------------------------------------- protocols


def test_constant_protocol():
    proto = Constant(omega=1.3)
    assert drive_value(proto, 17.0) == 1.3
    assert drive_derivative(proto, 17.0) == 0.0
    with pytest.raises(ValueError):
        Constant(omega=0.0)


def test_cosine_protocol_values():
    proto = Cosine(omega0=1.0, d=0.01, Omega=2.0)
    assert proto.value(0.0) == pytest.approx(1.01)
    assert proto.value(math.pi / 2.0) == pytest.approx(0.99)
    assert proto.derivative(0.0) == 0.0
    # derivative matches a central finite difference
    t, h = 0.731, 1e-6
    fd = (proto.value(t + h) - proto.value(t - h)) / (2.0 * h)
    assert proto.derivative(t) == pytest.approx(fd, rel=1e-8)


def test_cosine_validation():
    with pytest.raises(ValueError):
        Cosine(omega0=1.0, d=-0.01, Omega=2.0)
    with pytest.raises(ValueError):
        Cosine(omega0=1.0, d=1.0, Omega=2.0)  # would drive w(t) through zero
    with pytest.raises(ValueError):
        Cosine(omega0=1.0, d=0.01, Omega=0.0)


def test_switch_ramp_values():
    proto = SwitchRamp(omega1=1.0, omega2=1.2, t_switch=5.0, tau=0.1)
    assert proto.value(5.0) == pytest.approx(1.1)
    assert proto.value(-100.0) == pytest.approx(1.0, abs=1e-12)
    assert proto.value(100.0) == pytest.approx(1.2, abs=1e-12)
    t, h = 5.03, 1e-6
    fd = (proto.value(t + h) - proto.value(t - h)) / (2.0 * h)
    assert proto.derivative(t) == pytest.approx(fd, rel=1e-7)
    # far from the ramp the derivative underflows to exactly zero
    assert proto.derivative(1e6) == 0.0
    with pytest.raises(ValueError):
        SwitchRamp(omega1=1.0, omega2=1.2, t_switch=0.0, tau=0.0)


# ---------------------------------------------------------------- assembly


def test_hamiltonian_hermitian_at_any_time():
    ops = build_operators(6)
    params = SystemParams(epsilon=0.9)
    proto = Cosine(omega0=1.0, d=0.05, Omega=1.93)
    for t in (0.0, 0.37, 2.11, 40.0):
        h = assemble_hamiltonian(ops, params, proto, TermSelection(), t)
        assert np.array_equal(h, h.conj().T)


def test_bare_hamiltonian_diagonal():
    ops = build_operators(4)
    params = SystemParams(epsilon=0.9, g=0.05)
    terms = TermSelection(include_casimir=False, interaction=Interaction.NONE)
    h = assemble_hamiltonian(ops, params, Constant(omega=1.1), terms, 3.0)
    want = np.diag(
        np.concatenate([1.1 * np.arange(5.0), 0.9 + 1.1 * np.arange(5.0)])
    )
    assert np.allclose(h, want, rtol=0.0, atol=1e-15)


def test_interaction_selection_blocks():
    ops = build_operators(4)
    g = 0.05
    full = assemble_hamiltonian(
        ops, SystemParams(g=g), Constant(omega=1.0),
        TermSelection(interaction=Interaction.FULL), 0.0,
    )
    jc = assemble_hamiltonian(
        ops, SystemParams(g=g), Constant(omega=1.0),
        TermSelection(interaction=Interaction.JAYNES_CUMMINGS), 0.0,
    )
    ajc = assemble_hamiltonian(
        ops, SystemParams(g=g), Constant(omega=1.0),
        TermSelection(interaction=Interaction.ANTI_JAYNES_CUMMINGS), 0.0,
    )
    none = assemble_hamiltonian(
        ops, SystemParams(g=g), Constant(omega=1.0),
        TermSelection(interaction=Interaction.NONE), 0.0,
    )
    # the two interaction channels live on disjoint entries and add up
    assert np.array_equal(full, jc + ajc - np.diag(np.diagonal(jc)))
    e0, g0 = ops.basis_index("e", 0), ops.basis_index("g", 0)
    g1, e1 = ops.basis_index("g", 1), ops.basis_index("e", 1)
    assert jc[e0, g1] == pytest.approx(g)  # excitation-conserving exchange
    assert jc[e1, g0] == 0.0
    assert ajc[e1, g0] == pytest.approx(g)  # pair creation channel
    assert ajc[e0, g1] == 0.0
    assert np.array_equal(none, np.diag(np.diagonal(none)))


def test_exchange_matrix_element_sqrt_scaling():
    ops = build_operators(6)
    g = 0.05
    h = assemble_hamiltonian(
        ops, SystemParams(g=g), Constant(omega=1.0),
        TermSelection(interaction=Interaction.JAYNES_CUMMINGS), 0.0,
    )
    # <e,n|H|g,n+1> = g sqrt(n+1)
    for n in range(5):
        i, j = ops.basis_index("e", n), ops.basis_index("g", n + 1)
        assert h[i, j] == pytest.approx(g * math.sqrt(n + 1))


def test_squeeze_coefficient():
    ops = build_operators(4)
    params = SystemParams()
    proto = Cosine(omega0=1.0, d=0.01, Omega=2.0)
    terms = HamiltonianTerms(ops, params, proto, TermSelection())
    t = 0.41
    want = proto.derivative(t) / (4.0 * proto.value(t))
    assert terms.casimir_coefficient(t) == pytest.approx(want, rel=1e-15)
    off = HamiltonianTerms(
        ops, params, proto, TermSelection(include_casimir=False)
    )
    assert off.casimir_coefficient(t) == 0.0
    # the full H includes q(t) * i(a^2 - a'^2) exactly
    h = terms.at(t)
    h_off = off.at(t)
    assert np.allclose(
        h - h_off, want * 1j * (ops.a_sq - ops.a_dag_sq), rtol=0.0, atol=1e-18
    )


def test_one_shot_assembly_matches_cached_terms():
    ops = build_operators(5)
    params = SystemParams(epsilon=1.05)
    proto = Cosine(omega0=1.0, d=0.02, Omega=1.9)
    sel = TermSelection()
    cached = HamiltonianTerms(ops, params, proto, sel)
    for t in (0.0, 1.7):
        assert np.array_equal(cached.at(t), assemble_hamiltonian(ops, params, proto, sel, t))


def test_two_excitation_doublet_splitting():
    # the |g,2>/|e,1> pair couples through sqrt(2) g, so at zero detuning the
    # stationary levels sit at 2 omega0 +/- sqrt(2) g
    ops = build_operators(8)
    g = 0.05
    h = assemble_hamiltonian(
        ops, SystemParams(g=g), Constant(omega=1.0),
        TermSelection(include_casimir=False, interaction=Interaction.JAYNES_CUMMINGS),
        0.0,
    )
    energies = np.linalg.eigvalsh(h)
    near = energies[np.abs(energies - 2.0) < 0.5]
    assert len(near) == 2
    assert near[0] == pytest.approx(2.0 - math.sqrt(2.0) * g, abs=1e-12)
    assert near[1] == pytest.approx(2.0 + math.sqrt(2.0) * g, abs=1e-12)


# ---------------------------------------------------------------- dressed states


def test_dressed_ground_state():
    ops = build_operators(8)
    g0 = ops.basis_index("g", 0)
    h_jc = assemble_hamiltonian(
        ops, SystemParams(g=0.05), Constant(omega=1.0),
        TermSelection(include_casimir=False, interaction=Interaction.JAYNES_CUMMINGS),
        0.0,
    )
    vec, energy = dressed_state(h_jc, g0)
    # the exchange terms cannot act on |g,0>, so it stays an exact eigenstate
    assert energy == pytest.approx(0.0, abs=1e-13)
    assert abs(vec[g0]) ** 2 == pytest.approx(1.0, abs=1e-13)

    h_full = assemble_hamiltonian(
        ops, SystemParams(g=0.05), Constant(omega=1.0),
        TermSelection(include_casimir=False, interaction=Interaction.FULL),
        0.0,
    )
    vec, energy = dressed_state(h_full, g0)
    # counterrotating terms admix |e,1> and push the level down by ~ g^2/(w0+eps)
    assert abs(vec[g0]) ** 2 > 0.99
    assert energy == pytest.approx(-0.05**2 / 2.0, rel=0.2)
    assert energy < 0.0


def test_dressed_excitation_on_bare_states():
    ops = build_operators(5)
    h = assemble_hamiltonian(
        ops, SystemParams(g=0.02), Constant(omega=1.0),
        TermSelection(include_casimir=False, interaction=Interaction.NONE),
        0.0,
    )
    rho_e = np.outer(ops.basis_vector("e", 0), ops.basis_vector("e", 0).conj())
    rho_g = np.outer(ops.basis_vector("g", 3), ops.basis_vector("g", 3).conj())
    assert dressed_excitation(ops, h, rho_e) == pytest.approx(1.0, abs=1e-12)
    assert dressed_excitation(ops, h, rho_g) == pytest.approx(0.0, abs=1e-12)
