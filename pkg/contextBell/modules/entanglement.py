"""Concurrence of pure two-qubit states."""

from dataclasses import dataclass

import numpy as np

from contextBell.modules.quantum_core import (
    PAULI_Y,
    PureState,
    check_normalized,
)
from contextBell.utils.config import get_tolerances
from contextBell.utils.errors import (
    DimensionMismatchError,
    InvalidConcurrenceError,
    NotNormalizedError,
)

SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)


@dataclass(frozen=True)
class Concurrence:
    """Degree of entanglement C of a two-qubit state, 0 <= C <= 1."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise InvalidConcurrenceError("Concurrence", self.value)

    def __float__(self):
        return self.value

    @classmethod
    def checked(cls, raw: float) -> "Concurrence":
        """
        Build a Concurrence from a computed value, clamping round-off.

        Values within the clamp tolerance below 0 (or above 1) are clamped;
        anything further out is a bug and raises InvalidConcurrenceError.
        """
        slack = get_tolerances().concurrence_clamp
        if raw < -slack or raw > 1.0 + slack:
            raise InvalidConcurrenceError("computed concurrence", raw)
        return cls(min(max(float(raw), 0.0), 1.0))


def concurrence_pure(state: PureState) -> Concurrence:
    """
    Concurrence 2|ad - bc| of a pure two-qubit state.

    Parameters
    ----------
    state : PureState
        Unit-norm state with amplitudes (a, b, c, d) over
        |00>, |01>, |10>, |11>.

    Returns
    -------
    Concurrence
        The concurrence, in [0, 1].

    Raises
    ------
    DimensionMismatchError
        If the state is not a two-qubit state.
    NotNormalizedError
        If the state is not normalised.
    """
    if state.dim != 4:
        raise DimensionMismatchError(
            "concurrence_pure", f"expected dimension 4, got {state.dim}"
        )
    check_normalized(state, "concurrence_pure")
    a, b, c, d = state.amplitudes
    return Concurrence.checked(2.0 * abs(a * d - b * c))


def concurrence_spin_flip(state: PureState) -> Concurrence:
    """Concurrence as |<psi| sigma_y (x) sigma_y |psi*>|, the spin-flip
    form of `concurrence_pure`."""
    if state.dim != 4:
        raise DimensionMismatchError(
            "concurrence_spin_flip", f"expected dimension 4, got {state.dim}"
        )
    check_normalized(state, "concurrence_spin_flip")
    psi = state.amplitudes
    return Concurrence.checked(abs(np.vdot(psi, SPIN_FLIP @ psi.conj())))


def concurrence_symmetric(a: complex, b: complex, c: complex) -> Concurrence:
    """
    Concurrence |2ac - b^2| of the symmetric state
    a|00> + b/sqrt(2) (|01> + |10>) + c|11>.

    Raises
    ------
    NotNormalizedError
        If |a|^2 + |b|^2 + |c|^2 deviates from 1 by more than the input
        tolerance.
    """
    norm_sq = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2
    if abs(norm_sq - 1.0) > get_tolerances().input_norm:
        raise NotNormalizedError(
            "concurrence_symmetric", f"|a|^2+|b|^2+|c|^2 = {norm_sq:.12g}"
        )
    return Concurrence.checked(abs(2 * a * c - b * b))
