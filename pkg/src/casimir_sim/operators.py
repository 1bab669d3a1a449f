"""Dense operators for a two-level system coupled to a truncated boson mode.

The joint Hilbert space is C^2 (x) Fock(n_max), laid out qubit-major:
index (g, n) -> n and (e, n) -> n_max + 1 + n, so dim = 2 * (n_max + 1).
All operators are dense complex matrices on the joint space and are frozen
(read-only) after construction, so a single OperatorSet can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

QUBIT_STATES = ("g", "e")


@dataclass(frozen=True)
class FockCutoff:
    """Boson-space truncation at Fock level n_max (inclusive)."""

    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)):
            raise TypeError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")


def basis_index(qubit_state: str, fock_level: int, n_max: int) -> int:
    """Flat index of the joint basis state |qubit_state, fock_level>."""
    if qubit_state not in QUBIT_STATES:
        raise ValueError(f"qubit_state must be 'g' or 'e', got {qubit_state!r}")
    if not 0 <= fock_level <= n_max:
        raise ValueError(
            f"fock_level must be in [0, {n_max}], got {fock_level}"
        )
    return (n_max + 1) * QUBIT_STATES.index(qubit_state) + fock_level


@dataclass(frozen=True)
class OperatorSet:
    """Joint-space operator matrices for one Fock cutoff."""

    n_max: int
    dim: int
    a: np.ndarray
    a_dag: np.ndarray
    n_op: np.ndarray
    a_sq: np.ndarray
    a_dag_sq: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    sigma_z: np.ndarray
    identity: np.ndarray
    fock_levels: np.ndarray = field(repr=False, default=None)

    def basis_index(self, qubit_state: str, fock_level: int) -> int:
        return basis_index(qubit_state, fock_level, self.n_max)

    def basis_vector(self, qubit_state: str, fock_level: int) -> np.ndarray:
        """Unit column vector for |qubit_state, fock_level>."""
        vec = np.zeros(self.dim, dtype=np.complex128)
        vec[self.basis_index(qubit_state, fock_level)] = 1.0
        return vec


def _freeze(mat: np.ndarray) -> np.ndarray:
    mat.setflags(write=False)
    return mat


def build_operators(cutoff: FockCutoff | int) -> OperatorSet:
    """Construct all joint-space operators for the given cutoff.

    Adjoint pairs are built by conjugate transposition of a single parent
    matrix so that hermiticity relations hold entrywise exactly; composite
    operators (n_op, a_sq, ...) are stored as the actual matrix products.
    """
    if isinstance(cutoff, (int, np.integer)):
        cutoff = FockCutoff(int(cutoff))
    n_max = cutoff.n_max
    levels = n_max + 1
    dim = 2 * levels

    a_fock = np.diag(np.sqrt(np.arange(1.0, levels)), 1).astype(np.complex128)
    eye2 = np.eye(2, dtype=np.complex128)
    a = np.kron(eye2, a_fock)
    a_dag = a.conj().T.copy()

    # sigma_minus maps e -> g: row index g, column index e in qubit space.
    lower_qubit = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
    eye_fock = np.eye(levels, dtype=np.complex128)
    sigma_minus = np.kron(lower_qubit, eye_fock)
    sigma_plus = sigma_minus.conj().T.copy()

    identity = np.eye(dim, dtype=np.complex128)
    sigma_z = 2.0 * (sigma_plus @ sigma_minus) - identity

    ops = OperatorSet(
        n_max=n_max,
        dim=dim,
        a=_freeze(a),
        a_dag=_freeze(a_dag),
        n_op=_freeze(a_dag @ a),
        a_sq=_freeze(a @ a),
        a_dag_sq=_freeze((a @ a).conj().T.copy()),
        sigma_plus=_freeze(sigma_plus),
        sigma_minus=_freeze(sigma_minus),
        sigma_z=_freeze(sigma_z),
        identity=_freeze(identity),
        fock_levels=_freeze(np.tile(np.arange(levels, dtype=np.float64), 2)),
    )
    return ops
