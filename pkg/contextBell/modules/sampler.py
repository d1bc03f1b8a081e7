"""
Finite-shot Monte Carlo simulation of the KCBS and CHSH experiments.

Each term of either inequality is the average of the product of two
compatible dichotomic measurements. A shot measures the first observable
projectively (Born probabilities from its eigenspace projectors),
collapses the state onto the observed eigenspace, then measures the
second observable on the collapsed state.

Random numbers come from numpy's Philox (counter-based) generator, so a
given seed reproduces the same outcomes on every platform. Term k of a
multi-term estimate uses seed + k * TERM_SEED_STRIDE.
"""

from dataclasses import dataclass

import numpy as np

from contextBell.modules.chsh import ChshSettings
from contextBell.modules.kcbs import KcbsObservables
from contextBell.modules.quantum_core import (
    PAULI_I,
    PureState,
    check_normalized,
    commutator_norm,
    eigensystem,
    pauli_dot,
    tensor,
)
from contextBell.utils.config import get_tolerances
from contextBell.utils.errors import (
    CollapseError,
    DimensionMismatchError,
    NotCommutingError,
    NotDichotomicError,
    OutOfRangeError,
)
from contextBell.utils.logger_config import logger
from contextBell.utils.optimize_helpers import make_rng

TERM_SEED_STRIDE = 1_000_003

# (first, second, sign) for the four CHSH correlators
CHSH_TERMS = ((0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1))


@dataclass(frozen=True)
class ShotEstimate:
    """
    Empirical mean with its standard error.

    Attributes
    ----------
    mean : float
        Sample mean (a sum of term means for multi-term estimates).
    stderr : float
        Sample standard deviation (Bessel-corrected) / sqrt(shots);
        combined in quadrature across terms.
    shots : int
        Shots per term.
    seed : int
        Seed of the (first) term.
    """

    mean: float
    stderr: float
    shots: int
    seed: int


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Per-shot outcome pairs (+1/-1) of one term."""

    outcomes: np.ndarray
    term_index: int

    @property
    def products(self) -> np.ndarray:
        return self.outcomes[:, 0] * self.outcomes[:, 1]


def _dichotomic_outcomes(system, context):
    """Map the eigenvalues of a dichotomic observable to +1/-1."""
    tol = get_tolerances().spectrum
    outcomes = []
    for value in system.eigenvalues:
        if abs(abs(value) - 1.0) > tol:
            raise NotDichotomicError(context, f"eigenvalue {value:.6g}")
        outcomes.append(1 if value > 0 else -1)
    return np.array(outcomes, dtype=np.int8)


def _pair_distribution(state, first, second):
    """
    Joint outcome distribution of sequential measurement with collapse.

    Returns the outcome labels of each observable, the probabilities of
    the first outcome and, for each first outcome, the conditional
    probabilities of the second.
    """
    psi = state.amplitudes
    first_system = eigensystem(first)
    second_system = eigensystem(second)
    first_labels = _dichotomic_outcomes(first_system, "first observable")
    second_labels = _dichotomic_outcomes(second_system, "second observable")

    first_probs = np.array(
        [np.linalg.norm(P @ psi) ** 2 for P in first_system.projectors]
    )
    conditional = np.zeros((len(first_probs), len(second_labels)))
    for k, projector in enumerate(first_system.projectors):
        if first_probs[k] == 0:
            conditional[k, 0] = 1.0
            continue
        collapsed = projector @ psi / np.sqrt(first_probs[k])
        # Repeating the first measurement must reproduce outcome k
        repeat = np.linalg.norm(projector @ collapsed) ** 2
        if abs(repeat - 1.0) > get_tolerances().collapse:
            raise CollapseError(
                "sample_pair", f"repeat probability {repeat:.12f}"
            )
        conditional[k] = [
            np.linalg.norm(Q @ collapsed) ** 2
            for Q in second_system.projectors
        ]

    first_probs = first_probs / first_probs.sum()
    conditional = conditional / conditional.sum(axis=1, keepdims=True)
    return first_labels, second_labels, first_probs, conditional


def _draw(cdf, uniforms):
    """Inverse-CDF sampling; `cdf` is one row or one row per draw."""
    if cdf.ndim == 1:
        index = np.searchsorted(cdf, uniforms, side="right")
    else:
        index = (uniforms[:, None] >= cdf).sum(axis=1)
    return np.minimum(index, cdf.shape[-1] - 1)


def record_pair(
    state: PureState, first, second, shots: int, seed: int, term_index=0
) -> MeasurementRecord:
    """
    Simulate `shots` sequential measurements of a commuting pair.

    Parameters
    ----------
    state : PureState
        Normalised state.
    first, second : HermitianObservable
        Commuting dichotomic observables, measured in this order.
    shots : int
        Number of shots (>= 1).
    seed : int
        Seed of the Philox stream.
    term_index : int, optional
        Label stored in the record.

    Returns
    -------
    MeasurementRecord
        Outcome pairs, one row per shot.

    Raises
    ------
    NotCommutingError
        If the commutator norm exceeds the commuting tolerance.
    NotNormalizedError
        If the state is not normalised.
    OutOfRangeError
        If shots < 1.
    """
    if shots < 1:
        raise OutOfRangeError("shots", f"{shots} must be >= 1")
    check_normalized(state, "sample_pair")
    if first.dim != state.dim or second.dim != state.dim:
        raise DimensionMismatchError(
            "sample_pair",
            f"state {state.dim}, observables {first.dim}, {second.dim}",
        )
    norm = commutator_norm(first, second)
    if norm > get_tolerances().commuting:
        raise NotCommutingError("sample_pair", f"commutator norm {norm:.3e}")

    first_labels, second_labels, first_probs, conditional = (
        _pair_distribution(state, first, second)
    )

    rng = make_rng(seed)
    uniforms = rng.random((shots, 2))
    first_index = _draw(np.cumsum(first_probs), uniforms[:, 0])
    second_index = _draw(
        np.cumsum(conditional, axis=1)[first_index], uniforms[:, 1]
    )
    outcomes = np.column_stack(
        [first_labels[first_index], second_labels[second_index]]
    )
    return MeasurementRecord(outcomes=outcomes, term_index=term_index)


def summarize(record: MeasurementRecord, seed: int) -> ShotEstimate:
    """Mean and Bessel-corrected standard error of the outcome
    products."""
    products = record.products.astype(float)
    shots = len(products)
    if shots == 1:
        logger.warning("Single shot: standard error reported as 0")
        stderr = 0.0
    else:
        stderr = float(np.std(products, ddof=1) / np.sqrt(shots))
    return ShotEstimate(
        mean=float(products.mean()), stderr=stderr, shots=shots, seed=seed
    )


def sample_pair(
    state: PureState, first, second, shots: int, seed: int
) -> ShotEstimate:
    """
    Estimate <first * second> from `shots` simulated joint measurements.

    See `record_pair` for parameters and errors. Deterministic for a fixed
    seed.
    """
    return summarize(record_pair(state, first, second, shots, seed), seed)


def combine(estimates, seed: int, signs=None) -> ShotEstimate:
    """Signed sum of term means with standard errors in quadrature."""
    signs = signs or [1] * len(estimates)
    return ShotEstimate(
        mean=float(sum(s * e.mean for s, e in zip(signs, estimates))),
        stderr=float(np.sqrt(sum(e.stderr**2 for e in estimates))),
        shots=estimates[0].shots,
        seed=seed,
    )


def estimate_kcbs(
    state: PureState,
    obs: KcbsObservables,
    shots_per_term: int,
    seed: int,
) -> ShotEstimate:
    """
    Empirical KCBS sum: five sampled <A_i A_{i+1}> terms, A_i measured
    first.

    Parameters
    ----------
    state : QutritPure
        Normalised qutrit state.
    obs : KcbsObservables
        The scenario.
    shots_per_term : int
        Shots for each of the five terms.
    seed : int
        Master seed; term i uses seed + i * TERM_SEED_STRIDE.

    Returns
    -------
    ShotEstimate
        Sum of the term means, standard errors in quadrature.
    """
    estimates = [
        sample_pair(
            state,
            obs.a_ops[i],
            obs.a_ops[(i + 1) % 5],
            shots_per_term,
            seed + i * TERM_SEED_STRIDE,
        )
        for i in range(5)
    ]
    result = combine(estimates, seed)
    logger.info(
        f"KCBS estimate {result.mean:.6f} +/- {result.stderr:.6f} "
        f"({shots_per_term} shots/term, seed {seed})"
    )
    return result


def estimate_chsh(
    state: PureState, s: ChshSettings, shots_per_term: int, seed: int
) -> ShotEstimate:
    """
    Empirical CHSH value E(a,b) + E(a,b') + E(a',b) - E(a',b').

    Each correlator measures (x . sigma) on the first qubit and then
    (y . sigma) on the second.

    Parameters
    ----------
    state : PureState
        Normalised two-qubit state.
    s : ChshSettings
        Measurement directions.
    shots_per_term : int
        Shots for each of the four correlators.
    seed : int
        Master seed; term k uses seed + k * TERM_SEED_STRIDE.

    Returns
    -------
    ShotEstimate
        Signed sum of the correlators, standard errors in quadrature.
    """
    a, a_prime, b, b_prime = s.arrays()
    alice = [tensor(pauli_dot(v), PAULI_I) for v in (a, a_prime)]
    bob = [tensor(PAULI_I, pauli_dot(v)) for v in (b, b_prime)]

    estimates = []
    signs = []
    for k, (i, j, sign) in enumerate(CHSH_TERMS):
        estimates.append(
            sample_pair(
                state,
                alice[i],
                bob[j],
                shots_per_term,
                seed + k * TERM_SEED_STRIDE,
            )
        )
        signs.append(sign)

    result = combine(estimates, seed, signs)
    logger.info(
        f"CHSH estimate {result.mean:.6f} +/- {result.stderr:.6f} "
        f"({shots_per_term} shots/term, seed {seed})"
    )
    return result
