"""
The KCBS scenario for a spin-1 system.

This module provides:
- the pentagram of five measurement directions, consecutive pairs
  orthogonal
- spin-1 observables S_l and the dichotomic A_i = 2 S_i^2 - 1
- the KCBS sum <A1A2> + <A2A3> + <A3A4> + <A4A5> + <A5A1>, whose
  non-contextual bound is -3 and quantum minimum 5 - 4 sqrt5
- a multi-start oracle for the minimum KCBS value at fixed concurrence,
  checked against the affine law (5 - 3 sqrt5) C - sqrt5

Qutrit amplitudes are over the basis (|1>, |0>, |-1>).
"""

from dataclasses import dataclass
from functools import partial
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import expm

from contextBell.modules.quantum_core import (
    IDENTITY_3,
    HermitianObservable,
    PureState,
    check_normalized,
    commutator_norm,
    eigensystem,
    expectation,
)
from contextBell.modules.symmetric_map import QutritPure
from contextBell.utils.config import (
    OptimizerParams,
    Tolerances,
    get_tolerances,
    use_tolerances,
)
from contextBell.utils.errors import (
    DimensionMismatchError,
    InvalidConcurrenceError,
    InvalidPentagramError,
    NotUnitError,
)
from contextBell.utils.logger_config import logger
from contextBell.utils.optimize_helpers import (
    RestartResult,
    check_stability,
    local_search,
    make_rng,
    run_restarts,
)

SQRT5 = np.sqrt(5.0)
KCBS_CLASSICAL_BOUND = -3.0
KCBS_QUANTUM_MINIMUM = 5.0 - 4.0 * SQRT5
DISCREPANCY_THRESHOLD = 1e-3

# Spin-1 matrices in the (|1>, |0>, |-1>) basis
SPIN1_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / (
    np.sqrt(2.0)
)
SPIN1_Y = np.array(
    [[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex
) / np.sqrt(2.0)
SPIN1_Z = np.diag([1, 0, -1]).astype(complex)
SPIN1 = (SPIN1_X, SPIN1_Y, SPIN1_Z)

# Columns are |1>, |0>, |-1> written in the Cartesian basis (x, y, z). In
# this basis the concurrence of a qutrit u is |u . u| (no conjugation).
CARTESIAN = np.array(
    [
        [-1 / np.sqrt(2.0), 0, 1 / np.sqrt(2.0)],
        [-1j / np.sqrt(2.0), 0, -1j / np.sqrt(2.0)],
        [0, 1, 0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class Direction3:
    """A unit vector in real 3-space."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        deviation = abs(self.x**2 + self.y**2 + self.z**2 - 1.0)
        if deviation > get_tolerances().unit:
            raise NotUnitError(
                f"({self.x}, {self.y}, {self.z})",
                f"|norm^2 - 1| = {deviation:.3e}",
            )

    @classmethod
    def from_vector(cls, vector) -> "Direction3":
        """Normalise a nonzero 3-vector into a direction."""
        vector = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise NotUnitError("zero vector")
        return cls(*(vector / norm))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Direction3":
        """Direction with polar angle `theta` and azimuth `phi`."""
        return cls(
            np.sin(theta) * np.cos(phi),
            np.sin(theta) * np.sin(phi),
            np.cos(theta),
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class PentagramConfig:
    """Five directions with l_i orthogonal to l_{i+1 mod 5}."""

    directions: tuple

    def __post_init__(self):
        directions = tuple(self.directions)
        if len(directions) != 5:
            raise InvalidPentagramError(
                "PentagramConfig", f"{len(directions)} directions given"
            )
        tol = get_tolerances().orthogonality
        for i in range(5):
            dot = float(
                directions[i].as_array() @ directions[(i + 1) % 5].as_array()
            )
            if abs(dot) > tol:
                raise InvalidPentagramError(
                    "PentagramConfig",
                    f"l_{i} . l_{(i + 1) % 5} = {dot:.3e}",
                )
        object.__setattr__(self, "directions", directions)

    def rotated(self, rotation: np.ndarray) -> "PentagramConfig":
        """Apply a 3x3 rotation matrix to every direction."""
        return PentagramConfig(
            tuple(
                Direction3.from_vector(rotation @ d.as_array())
                for d in self.directions
            )
        )


@dataclass(frozen=True, eq=False)
class KcbsObservables:
    """The five A_i and the five adjacent products A_i A_{i+1}."""

    a_ops: tuple
    products: tuple


class KcbsMinimum(NamedTuple):
    value: float
    argmin: QutritPure


def standard_pentagram() -> PentagramConfig:
    """
    The symmetric pentagram around the z axis.

    l_j = (sin t cos(4 pi j/5), sin t sin(4 pi j/5), cos t), j = 0..4,
    with cos^2 t = cos(pi/5) / (1 + cos(pi/5)) = 1/sqrt5, so consecutive
    directions are orthogonal.
    """
    cos_sq = np.cos(np.pi / 5) / (1 + np.cos(np.pi / 5))
    theta = np.arccos(np.sqrt(cos_sq))
    return PentagramConfig(
        tuple(
            Direction3.from_angles(theta, 4 * np.pi * j / 5) for j in range(5)
        )
    )


def spin1_operator(d: Direction3) -> HermitianObservable:
    """Return d_x S_x + d_y S_y + d_z S_z (spectrum -1, 0, +1)."""
    if not isinstance(d, Direction3):
        d = Direction3(*d)
    return HermitianObservable(d.x * SPIN1_X + d.y * SPIN1_Y + d.z * SPIN1_Z)


def kcbs_observables(p: PentagramConfig) -> KcbsObservables:
    """
    Build A_i = 2 S_i^2 - 1 and the products A_i A_{i+1}.

    Raises
    ------
    InvalidPentagramError
        If an A_i does not have spectrum {-1, +1, +1} or an adjacent pair
        fails to commute.
    """
    tol = get_tolerances()
    a_ops = []
    for i, direction in enumerate(p.directions):
        spin = spin1_operator(direction).matrix
        a_op = HermitianObservable(2 * spin @ spin - IDENTITY_3)
        spectrum = np.array(eigensystem(a_op).spectrum)
        if np.max(np.abs(spectrum - [-1.0, 1.0, 1.0])) > tol.spectrum:
            raise InvalidPentagramError(
                f"A_{i}", f"spectrum {spectrum} is not (-1, 1, 1)"
            )
        a_ops.append(a_op)

    products = []
    for i in range(5):
        first, second = a_ops[i], a_ops[(i + 1) % 5]
        # Adjacent directions are orthogonal, so the pair commutes and
        # the product is Hermitian
        norm = commutator_norm(first, second)
        if norm > tol.orthogonality:
            raise InvalidPentagramError(
                f"A_{i} A_{(i + 1) % 5}", f"commutator norm {norm:.3e}"
            )
        product = first.matrix @ second.matrix
        products.append(HermitianObservable((product + product.conj().T) / 2))

    logger.debug("Built KCBS observables")
    return KcbsObservables(a_ops=tuple(a_ops), products=tuple(products))


def kcbs_operator(obs: KcbsObservables) -> np.ndarray:
    """The summed operator A1A2 + A2A3 + A3A4 + A4A5 + A5A1."""
    return sum(product.matrix for product in obs.products)


def kcbs_value(state: PureState, obs: KcbsObservables) -> float:
    """
    Evaluate <A1A2> + <A2A3> + <A3A4> + <A4A5> + <A5A1>.

    Parameters
    ----------
    state : QutritPure
        Normalised qutrit state.
    obs : KcbsObservables
        The scenario's observables.

    Returns
    -------
    float
        KCBS sum, in [5 - 4 sqrt5, 5].

    Raises
    ------
    NotNormalizedError
        If the state does not have unit norm.
    """
    if state.dim != 3:
        raise DimensionMismatchError(
            "kcbs_value", f"expected a qutrit, got dimension {state.dim}"
        )
    check_normalized(state, "kcbs_value")
    return float(sum(expectation(state, product) for product in obs.products))


def is_contextual(value: float) -> bool:
    """True when a KCBS value lies below the non-contextual bound -3."""
    return value < KCBS_CLASSICAL_BOUND


def s_min_closed_form(C: float) -> float:
    """
    Minimum KCBS value for concurrence C: (5 - 3 sqrt5) C - sqrt5.

    Raises
    ------
    InvalidConcurrenceError
        If C is outside [0, 1].
    """
    _check_concurrence(C)
    return (5.0 - 3.0 * SQRT5) * C - SQRT5


def _check_concurrence(C):
    if not 0.0 <= C <= 1.0:
        raise InvalidConcurrenceError("concurrence", C)


def spin1_rotation(rotvec) -> np.ndarray:
    """
    Spin-1 representation exp(-i theta n.S) of the rotation by
    theta = |rotvec| about n = rotvec/theta.

    With R the matching 3x3 rotation matrix, U^H S_{R l} U = S_l, so
    rotating a state by U and the directions by R leaves KCBS values
    unchanged.
    """
    rotvec = np.asarray(rotvec, dtype=float)
    generator = sum(r * s for r, s in zip(rotvec, SPIN1))
    return expm(-1j * generator)


########################################################################
# Concurrence-constrained minimisation
########################################################################


def _fix_global_phase(amplitudes):
    """Rotate the global phase so the first non-negligible amplitude is
    real and positive."""
    tol = get_tolerances().amplitude
    for amplitude in amplitudes:
        if abs(amplitude) > tol:
            return amplitudes * (abs(amplitude) / amplitude)
    return amplitudes


def project_to_concurrence(amplitudes: np.ndarray, C: float) -> np.ndarray:
    """
    Map a unit qutrit vector onto the set of states with concurrence C.

    In Cartesian coordinates every unit vector is, up to a global phase,
    cos(e) p + i sin(e) q with p, q orthonormal real vectors and
    concurrence cos(2e). The projection keeps the phase, p and q and sets
    cos(2e) = C.
    """
    u = CARTESIAN @ amplitudes
    half_phase = np.angle(np.sum(u * u)) / 2
    v = np.exp(-1j * half_phase) * u
    p = v.real / np.linalg.norm(v.real)
    q = v.imag - (v.imag @ p) * p
    if np.linalg.norm(q) < get_tolerances().amplitude:
        # Real vector: any direction orthogonal to p will do
        axis = np.eye(3)[np.argmin(np.abs(p))]
        q = axis - (axis @ p) * p
    q = q / np.linalg.norm(q)

    eta = np.arccos(np.clip(C, 0.0, 1.0)) / 2
    projected = np.exp(1j * half_phase) * (
        np.cos(eta) * p + 1j * np.sin(eta) * q
    )
    return CARTESIAN.conj().T @ projected


def _amplitudes_from_params(x):
    """(|a|, |b| e^{i phi1}, |c| e^{i phi2}) from two magnitude angles and
    two relative phases."""
    t1, t2, phi1, phi2 = x
    return np.array(
        [
            np.cos(t1),
            np.sin(t1) * np.cos(t2) * np.exp(1j * phi1),
            np.sin(t1) * np.sin(t2) * np.exp(1j * phi2),
        ]
    )


def _constrained_objective(x, C, operator, penalty):
    raw = _amplitudes_from_params(x)
    feasible = project_to_concurrence(raw, C)
    value = np.vdot(feasible, operator @ feasible).real
    violation = abs(np.sum((CARTESIAN @ raw) ** 2)) - C
    return value + penalty * violation**2


def _kcbs_restart(index, C, operator, opt, tolerances) -> RestartResult:
    with use_tolerances(tolerances):
        rng = make_rng(opt.seed, index)
        x0 = np.concatenate(
            [
                rng.uniform(0, np.pi / 2, size=2),
                rng.uniform(0, 2 * np.pi, size=2),
            ]
        )
        objective = partial(
            _constrained_objective,
            C=C,
            operator=operator,
            penalty=opt.penalty,
        )
        return local_search(objective, x0, opt, index)


def kcbs_min_for_concurrence(
    C: float,
    opt: Optional[OptimizerParams] = None,
    obs: Optional[KcbsObservables] = None,
) -> KcbsMinimum:
    """
    Minimise the KCBS value over qutrit states of fixed concurrence.

    The directions stay fixed to the standard pentagram (a common spatial
    rotation of state and directions leaves the value unchanged). Each
    trial point is projected exactly onto the concurrence-C surface before
    evaluation, so the constraint holds to rounding error.

    Parameters
    ----------
    C : float
        Target concurrence in [0, 1].
    opt : OptimizerParams, optional
        Restarts, tolerance, budget and seed (defaults if omitted).
    obs : KcbsObservables, optional
        Scenario (standard pentagram if omitted).

    Returns
    -------
    KcbsMinimum
        (value, argmin). Among restarts tied within the tolerance, the
        argmin with the lexicographically smallest (|a|, |b|, |c|) is
        returned.

    Raises
    ------
    InvalidConcurrenceError
        If C is outside [0, 1].
    ConvergenceFailureError
        If the final restart still moved the best value.
    """
    _check_concurrence(C)
    opt = opt or OptimizerParams()
    obs = obs or kcbs_observables(standard_pentagram())
    operator = kcbs_operator(obs)
    tolerances: Tolerances = get_tolerances()

    task = partial(
        _kcbs_restart,
        C=C,
        operator=operator,
        opt=opt,
        tolerances=tolerances,
    )
    results = run_restarts(task, opt)
    check_stability(results, opt, f"kcbs_min_for_concurrence(C={C:.6g})")

    candidates = []
    for result in results:
        amplitudes = _fix_global_phase(
            project_to_concurrence(_amplitudes_from_params(result.x), C)
        )
        state = QutritPure(amplitudes / np.linalg.norm(amplitudes))
        candidates.append((kcbs_value(state, obs), state))

    best_value = min(value for value, _ in candidates)
    tied = [
        (value, state)
        for value, state in candidates
        if value <= best_value + opt.tolerance
    ]
    value, argmin = min(
        tied,
        key=lambda item: tuple(np.round(np.abs(item[1].amplitudes), 9)),
    )

    closed = s_min_closed_form(C)
    if value < closed - DISCREPANCY_THRESHOLD:
        logger.warning(
            f"KCBS oracle below closed form at C={C:.6g}: "
            f"{value:.9f} < {closed:.9f}"
        )
    logger.info(
        f"KCBS minimum at C={C:.6g}: oracle {value:.9f}, "
        f"closed form {closed:.9f}"
    )
    return KcbsMinimum(value=value, argmin=argmin)


def optimal_state_for_concurrence(C: float) -> QutritPure:
    """
    An analytic minimiser for `kcbs_min_for_concurrence` on the standard
    pentagram.

    In Cartesian coordinates the state is sqrt((1+C)/2) z +
    i sqrt((1-C)/2) x; at C = 1 it is the neutrally polarised |0>.
    """
    _check_concurrence(C)
    u = np.array(
        [1j * np.sqrt((1 - C) / 2), 0.0, np.sqrt((1 + C) / 2)],
        dtype=complex,
    )
    return QutritPure(_fix_global_phase(CARTESIAN.conj().T @ u))
