"""
The CHSH scenario for two qubits.

This module provides:
- the CHSH operator A (x) (B + B') + A' (x) (B - B') for dichotomic
  spin-1/2 observables n . sigma
- its expectation value and a direct multi-start maximisation over the
  four measurement directions
- the correlation-matrix value 2 sqrt(t1 + t2), an independent second
  oracle for the maximum
- the closed form beta = 2 sqrt(1 + C^2)
"""

from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from contextBell.modules.kcbs import Direction3
from contextBell.modules.quantum_core import (
    PAULIS,
    HermitianObservable,
    PureState,
    check_normalized,
    expectation,
    pauli_dot,
    tensor,
)
from contextBell.utils.config import OptimizerParams, get_tolerances
from contextBell.utils.errors import (
    ConvergenceFailureError,
    DimensionMismatchError,
    InvalidConcurrenceError,
    OutOfRangeError,
)
from contextBell.utils.logger_config import logger
from contextBell.utils.optimize_helpers import (
    RestartResult,
    check_stability,
    local_search,
    make_rng,
    run_restarts,
)

CHSH_LOCAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)

# Start polar angles stay this far from the poles, where the azimuth is
# degenerate
POLE_OFFSET = 1e-3


@dataclass(frozen=True)
class ChshSettings:
    """Measurement directions (a, a') for Alice and (b, b') for Bob."""

    alice: tuple
    bob: tuple

    def __post_init__(self):
        alice = tuple(_as_direction(d) for d in self.alice)
        bob = tuple(_as_direction(d) for d in self.bob)
        if len(alice) != 2 or len(bob) != 2:
            raise DimensionMismatchError(
                "ChshSettings", "each party needs exactly two directions"
            )
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @classmethod
    def from_angles(cls, angles) -> "ChshSettings":
        """Settings from eight angles (theta, phi) for a, a', b, b'."""
        d = [
            Direction3.from_angles(angles[2 * k], angles[2 * k + 1])
            for k in range(4)
        ]
        return cls(alice=(d[0], d[1]), bob=(d[2], d[3]))

    def arrays(self):
        """Return (a, a', b, b') as numpy 3-vectors."""
        return tuple(d.as_array() for d in self.alice + self.bob)


@dataclass(frozen=True)
class ChshResult:
    """A CHSH value together with the settings that produced it."""

    beta: float
    settings: ChshSettings

    def __post_init__(self):
        if abs(self.beta) > TSIRELSON_BOUND + get_tolerances().tsirelson:
            raise OutOfRangeError(
                "ChshResult", f"|beta| = {self.beta} exceeds 2 sqrt2"
            )


def _as_direction(d):
    return d if isinstance(d, Direction3) else Direction3(*d)


def canonical_settings() -> ChshSettings:
    """a = x, a' = z, b = (x+z)/sqrt2, b' = (x-z)/sqrt2 (2 sqrt2 on the
    Bell state (|00> + |11>)/sqrt2)."""
    return ChshSettings(
        alice=((1, 0, 0), (0, 0, 1)),
        bob=(
            Direction3.from_vector([1, 0, 1]),
            Direction3.from_vector([1, 0, -1]),
        ),
    )


def chsh_operator(s: ChshSettings) -> HermitianObservable:
    """Return (a.s) (x) (b.s + b'.s) + (a'.s) (x) (b.s - b'.s)."""
    a, a_prime, b, b_prime = (pauli_dot(v) for v in s.arrays())
    return HermitianObservable(
        tensor(a, b + b_prime).matrix + tensor(a_prime, b - b_prime).matrix
    )


def _check_two_qubit(state: PureState, context: str) -> None:
    if state.dim != 4:
        raise DimensionMismatchError(
            context, f"expected dimension 4, got {state.dim}"
        )
    check_normalized(state, context)


def chsh_value(state: PureState, s: ChshSettings) -> float:
    """Expectation value of the CHSH operator in `state`."""
    _check_two_qubit(state, "chsh_value")
    return expectation(state, chsh_operator(s))


def correlation_matrix(state: PureState) -> np.ndarray:
    """The 3x3 real matrix T_ij = <sigma_i (x) sigma_j>."""
    _check_two_qubit(state, "correlation_matrix")
    return np.array(
        [
            [expectation(state, tensor(si, sj)) for sj in PAULIS]
            for si in PAULIS
        ]
    )


def chsh_max_correlation(state: PureState) -> float:
    """
    Maximal CHSH value 2 sqrt(t1 + t2), with t1 >= t2 the two largest
    eigenvalues of T^T T.

    Parameters
    ----------
    state : PureState
        Normalised two-qubit state.

    Returns
    -------
    float
        The maximum over all measurement settings.
    """
    t = correlation_matrix(state)
    eigenvalues = np.linalg.eigvalsh(t.T @ t)
    return float(2.0 * np.sqrt(max(eigenvalues[-1] + eigenvalues[-2], 0.0)))


def _unit_from_angles(theta, phi):
    return np.array(
        [
            np.sin(theta) * np.cos(phi),
            np.sin(theta) * np.sin(phi),
            np.cos(theta),
        ]
    )


def _negative_chsh(x, correlations):
    """-beta for eight angles, with beta = a.T(b + b') + a'.T(b - b')."""
    a, a_prime, b, b_prime = (
        _unit_from_angles(x[2 * k], x[2 * k + 1]) for k in range(4)
    )
    beta = a @ correlations @ (b + b_prime) + a_prime @ correlations @ (
        b - b_prime
    )
    return -beta


def _chsh_restart(index, correlations, opt) -> RestartResult:
    rng = make_rng(opt.seed, index)
    x0 = np.empty(8)
    x0[0::2] = rng.uniform(POLE_OFFSET, np.pi - POLE_OFFSET, size=4)
    x0[1::2] = rng.uniform(0, 2 * np.pi, size=4)
    objective = partial(_negative_chsh, correlations=correlations)
    return local_search(objective, x0, opt, index)


def chsh_max_direct(
    state: PureState, opt: Optional[OptimizerParams] = None
) -> ChshResult:
    """
    Maximise the CHSH value over all four measurement directions.

    Each direction is given by spherical angles (eight parameters in
    total). The expectation of the CHSH operator is bilinear in the
    directions through T_ij = <sigma_i (x) sigma_j>, which is computed
    once per state.

    Parameters
    ----------
    state : PureState
        Normalised two-qubit state.
    opt : OptimizerParams, optional
        Restarts, tolerance, budget and seed (defaults if omitted).

    Returns
    -------
    ChshResult
        Best value and settings.

    Raises
    ------
    ConvergenceFailureError
        If the final restart still moved the best value, or the best value
        falls short of `chsh_max_correlation` by more than
        `opt.certify_tolerance`.
    """
    _check_two_qubit(state, "chsh_max_direct")
    opt = opt or OptimizerParams()
    correlations = correlation_matrix(state)

    task = partial(_chsh_restart, correlations=correlations, opt=opt)
    results = run_restarts(task, opt)
    check_stability(results, opt, "chsh_max_direct")

    best = min(results, key=lambda r: (r.value, r.index))
    settings = ChshSettings.from_angles(best.x)
    beta = chsh_value(state, settings)

    reference = chsh_max_correlation(state)
    if beta < reference - opt.certify_tolerance:
        raise ConvergenceFailureError(
            "chsh_max_direct",
            f"direct {beta:.9f} below correlation-matrix {reference:.9f}",
        )
    if beta > reference + get_tolerances().tsirelson:
        logger.warning(
            f"Direct CHSH value {beta:.12f} above correlation-matrix "
            f"value {reference:.12f}"
        )

    logger.info(f"CHSH maximum (direct) {beta:.9f}")
    return ChshResult(beta=beta, settings=settings)


def beta_closed_form(C: float) -> float:
    """
    Maximal CHSH value 2 sqrt(1 + C^2) of a pure state with concurrence C.

    Raises
    ------
    InvalidConcurrenceError
        If C is outside [0, 1].
    """
    if not 0.0 <= C <= 1.0:
        raise InvalidConcurrenceError("beta_closed_form", C)
    return float(2.0 * np.sqrt(1.0 + C * C))


def chsh_bound_violated(beta: float) -> bool:
    """True when beta exceeds the local bound 2."""
    return beta > CHSH_LOCAL_BOUND


def random_pure_state(rng: np.random.Generator, dim: int = 4) -> PureState:
    """Haar-random pure state of dimension `dim`."""
    values = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState.from_amplitudes(values)
