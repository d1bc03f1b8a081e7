"""
Mapping between symmetric two-qubit states and effective qutrit states.

The symmetric (triplet) subspace of two qubits,

    a|00> + b/sqrt(2) (|01> + |10>) + c|11>,

carries the spin-1 state a|1> + b|0> + c|-1>. The qutrit basis order is
fixed as (m = +1, m = 0, m = -1).
"""

from dataclasses import dataclass

import numpy as np

from contextBell.modules.quantum_core import (
    PureState,
    check_normalized,
    normalize,
)
from contextBell.utils.config import get_tolerances
from contextBell.utils.errors import (
    DimensionMismatchError,
    NotNormalizedError,
    NotSymmetricError,
)
from contextBell.utils.logger_config import logger

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class SymmetricTwoQubit:
    """
    Amplitudes (a, b, c) of a symmetric two-qubit state.

    Raises
    ------
    NotNormalizedError
        If |a|^2 + |b|^2 + |c|^2 deviates from 1 by more than the input
        tolerance.
    """

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm_sq = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2
        if abs(norm_sq - 1.0) > get_tolerances().input_norm:
            raise NotNormalizedError(
                "SymmetricTwoQubit", f"|a|^2+|b|^2+|c|^2 = {norm_sq:.12g}"
            )

    @classmethod
    def normalized(cls, a, b, c) -> "SymmetricTwoQubit":
        """Build a state from unnormalised amplitudes."""
        a, b, c = normalize(PureState(np.array([a, b, c]))).amplitudes
        return cls(a, b, c)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=complex)


class QutritPure(PureState):
    """A unit-norm spin-1 state over the basis (|1>, |0>, |-1>)."""

    def __post_init__(self):
        super().__post_init__()
        if self.dim != 3:
            raise DimensionMismatchError(
                "QutritPure", f"expected dimension 3, got {self.dim}"
            )
        check_normalized(self, "QutritPure")

    @classmethod
    def basis(cls, m: int) -> "QutritPure":
        """Return the spin-1 basis state |m>, m in {1, 0, -1}."""
        amplitudes = np.zeros(3, dtype=complex)
        amplitudes[1 - m] = 1.0
        return cls(amplitudes)


def embed(s: SymmetricTwoQubit) -> PureState:
    """Return (a, b/sqrt2, b/sqrt2, c) over |00>, |01>, |10>, |11>."""
    return PureState(np.array([s.a, s.b / SQRT2, s.b / SQRT2, s.c]))


def to_qutrit(s: SymmetricTwoQubit) -> QutritPure:
    """Reinterpret (a, b, c) as a|1> + b|0> + c|-1>."""
    return QutritPure(s.as_array())


def from_qutrit(q: QutritPure) -> SymmetricTwoQubit:
    """Inverse of `to_qutrit`."""
    a, b, c = q.amplitudes
    return SymmetricTwoQubit(a, b, c)


def project_symmetric(state: PureState, tol=None) -> SymmetricTwoQubit:
    """
    Recover the symmetric amplitudes of a two-qubit state.

    Parameters
    ----------
    state : PureState
        Two-qubit state (alpha, beta, gamma, delta).
    tol : float, optional
        Largest antisymmetric component |beta - gamma|/sqrt2 accepted.
        Defaults to the configured symmetric tolerance (1e-9).

    Returns
    -------
    SymmetricTwoQubit
        (alpha, (beta + gamma)/sqrt2, delta), renormalised.

    Raises
    ------
    DimensionMismatchError
        If the state is not a two-qubit state.
    NotSymmetricError
        If the antisymmetric component exceeds `tol`.
    """
    if state.dim != 4:
        raise DimensionMismatchError(
            "project_symmetric", f"expected dimension 4, got {state.dim}"
        )
    if tol is None:
        tol = get_tolerances().symmetric

    alpha, beta, gamma, delta = state.amplitudes
    antisymmetric = abs(beta - gamma) / SQRT2
    if antisymmetric > tol:
        raise NotSymmetricError(
            "project_symmetric",
            f"antisymmetric component {antisymmetric:.3e} > {tol:.1e}",
        )
    if antisymmetric > 0:
        logger.debug(
            f"Dropping antisymmetric component {antisymmetric:.3e}"
        )

    return SymmetricTwoQubit.normalized(alpha, (beta + gamma) / SQRT2, delta)


def random_symmetric(rng: np.random.Generator) -> SymmetricTwoQubit:
    """Draw a Haar-random symmetric state (complex Gaussian triple,
    normalised)."""
    values = rng.normal(size=3) + 1j * rng.normal(size=3)
    return SymmetricTwoQubit.normalized(*values)
