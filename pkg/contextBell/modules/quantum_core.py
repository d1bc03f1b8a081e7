"""
Exact small-dimension linear algebra for pure states and observables.

This module provides:
- `PureState`, `HermitianObservable` and `EigenSystem` records
- normalisation, expectation values, tensor products and commutators
- eigendecomposition grouped into eigenspace projectors, which is what a
  projective measurement needs

Only dimensions 2, 3 and 4 occur (qubit, qutrit, two qubits). All
functions are pure and safe to call concurrently.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from contextBell.utils.config import get_tolerances
from contextBell.utils.errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotNormalizedError,
    ZeroVectorError,
)

DIMENSIONS = (2, 3, 4)


def _readonly(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PureState:
    """
    A pure state given by its amplitudes in a fixed basis.

    The amplitudes are stored as given; use `normalize` (or
    `PureState.from_amplitudes`) to obtain a unit-norm state.

    Attributes
    ----------
    amplitudes : numpy.ndarray
        Read-only complex vector of length 2, 3 or 4.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _readonly(self.amplitudes).reshape(-1)
        if amplitudes.shape[0] not in DIMENSIONS:
            raise DimensionMismatchError(
                "PureState", f"dimension {amplitudes.shape[0]}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_amplitudes(cls, values: Sequence[complex], normalized=True):
        """Build a state from amplitudes, normalising unless told not
        to."""
        state = cls(np.asarray(values, dtype=complex))
        return normalize(state) if normalized else state

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class HermitianObservable:
    """
    An observable given by a Hermitian matrix.

    Attributes
    ----------
    matrix : numpy.ndarray
        Read-only complex square matrix of dimension 2, 3 or 4, equal to
        its conjugate transpose within the Hermiticity tolerance.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = _readonly(self.matrix)
        if (
            matrix.ndim != 2
            or matrix.shape[0] != matrix.shape[1]
            or matrix.shape[0] not in DIMENSIONS
        ):
            raise DimensionMismatchError(
                "HermitianObservable", f"shape {matrix.shape}"
            )
        _check_hermitian(matrix, "HermitianObservable")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EigenSystem:
    """
    Spectral decomposition with degenerate eigenvalues grouped.

    Attributes
    ----------
    eigenvalues : tuple of float
        Distinct eigenvalues, ascending.
    projectors : tuple of numpy.ndarray
        Projector onto the eigenspace of each eigenvalue.
    multiplicities : tuple of int
        Dimension of each eigenspace.
    """

    eigenvalues: tuple
    projectors: tuple
    multiplicities: tuple

    @property
    def spectrum(self) -> tuple:
        """Eigenvalues repeated by multiplicity, ascending."""
        return tuple(
            value
            for value, count in zip(self.eigenvalues, self.multiplicities)
            for _ in range(count)
        )


# Pauli matrices and identities
PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)
IDENTITY_3 = np.eye(3, dtype=complex)

for _matrix in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, IDENTITY_3):
    _matrix.setflags(write=False)


def _check_hermitian(matrix, context):
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    if deviation > get_tolerances().hermitian:
        raise NotHermitianError(context, f"max |M - M^H| = {deviation:.3e}")


def _as_matrix(obs: Union[HermitianObservable, np.ndarray]) -> np.ndarray:
    if isinstance(obs, HermitianObservable):
        return obs.matrix
    return np.asarray(obs, dtype=complex)


def check_normalized(state: PureState, context: str) -> None:
    """
    Raise NotNormalizedError if `state` deviates from unit norm by more
    than the input tolerance.
    """
    deviation = abs(state.norm - 1.0)
    if deviation > get_tolerances().input_norm:
        raise NotNormalizedError(context, f"|norm - 1| = {deviation:.3e}")


def normalize(state: PureState) -> PureState:
    """
    Scale a state to unit norm, preserving its direction.

    Parameters
    ----------
    state : PureState
        State with nonzero norm.

    Returns
    -------
    PureState
        `state / ||state||`.

    Raises
    ------
    ZeroVectorError
        If the norm is below the zero-norm tolerance.
    """
    norm = state.norm
    if norm < get_tolerances().zero_norm:
        raise ZeroVectorError(f"dimension {state.dim} vector")
    amplitudes = state.amplitudes / norm
    # Second pass removes the last ulp of drift so normalize is idempotent
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    return PureState(amplitudes)


def expectation(
    state: PureState, obs: Union[HermitianObservable, np.ndarray]
) -> float:
    """
    Return the expectation value <psi|O|psi>.

    Parameters
    ----------
    state : PureState
        The state.
    obs : HermitianObservable or numpy.ndarray
        The observable, of the same dimension as the state.

    Returns
    -------
    float
        The real part of the quadratic form.

    Raises
    ------
    DimensionMismatchError
        If the dimensions differ.
    NotHermitianError
        If the quadratic form has an imaginary part above tolerance.
    """
    matrix = _as_matrix(obs)
    if matrix.shape != (state.dim, state.dim):
        raise DimensionMismatchError(
            "expectation", f"state {state.dim}, observable {matrix.shape}"
        )
    value = np.vdot(state.amplitudes, matrix @ state.amplitudes)
    if abs(value.imag) > get_tolerances().imag_residue:
        raise NotHermitianError(
            "expectation", f"imaginary residue {value.imag:.3e}"
        )
    return float(value.real)


def tensor(a, b) -> HermitianObservable:
    """
    Kronecker product of two observables.

    Parameters
    ----------
    a, b : HermitianObservable or numpy.ndarray
        Square factors; the product dimension must not exceed 4.

    Returns
    -------
    HermitianObservable
        `a (x) b`, rows indexed by (i, k) as 2i + k for qubit factors.
    """
    matrix_a = _as_matrix(a)
    matrix_b = _as_matrix(b)
    for matrix in (matrix_a, matrix_b):
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(
                "tensor", f"non-square factor {matrix.shape}"
            )
    return HermitianObservable(np.kron(matrix_a, matrix_b))


def commutator_norm(a, b) -> float:
    """Frobenius norm of AB - BA; zero exactly when A and B commute."""
    matrix_a = _as_matrix(a)
    matrix_b = _as_matrix(b)
    if matrix_a.shape != matrix_b.shape:
        raise DimensionMismatchError(
            "commutator_norm", f"{matrix_a.shape} vs {matrix_b.shape}"
        )
    return float(
        np.linalg.norm(matrix_a @ matrix_b - matrix_b @ matrix_a, "fro")
    )


def eigensystem(obs) -> EigenSystem:
    """
    Eigendecomposition of a Hermitian observable into eigenspace
    projectors.

    Eigenvalues closer than the degeneracy tolerance are grouped into one
    eigenspace and reported once, with its multiplicity.

    Parameters
    ----------
    obs : HermitianObservable or numpy.ndarray
        Hermitian matrix.

    Returns
    -------
    EigenSystem
        Distinct ascending eigenvalues with their projectors.

    Raises
    ------
    NotHermitianError
        If `obs` is a raw matrix that is not Hermitian.
    """
    matrix = _as_matrix(obs)
    _check_hermitian(matrix, "eigensystem")
    tol = get_tolerances()

    # eigh returns ascending eigenvalues and orthonormal eigenvectors
    values, vectors = np.linalg.eigh(matrix)

    groups = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[groups[-1][-1]] < tol.degeneracy:
            groups[-1].append(k)
        else:
            groups.append([k])

    eigenvalues = []
    projectors = []
    for group in groups:
        basis = vectors[:, group]
        projector = basis @ basis.conj().T
        projector.setflags(write=False)
        eigenvalues.append(float(np.mean(values[group])))
        projectors.append(projector)

    system = EigenSystem(
        eigenvalues=tuple(eigenvalues),
        projectors=tuple(projectors),
        multiplicities=tuple(len(group) for group in groups),
    )

    reconstruction = sum(
        value * projector
        for value, projector in zip(system.eigenvalues, system.projectors)
    )
    error = float(np.linalg.norm(reconstruction - matrix, "fro"))
    if error > tol.reconstruction:
        raise NotHermitianError(
            "eigensystem", f"reconstruction error {error:.3e}"
        )

    return system


def pauli_dot(direction) -> np.ndarray:
    """Return n . sigma for a 3-vector n (a dichotomic qubit observable
    when n is a unit vector)."""
    n = np.asarray(direction, dtype=float)
    return n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
