"""
Linking KCBS contextuality and CHSH non-locality through concurrence.

Both laws are functions of the concurrence C of a symmetric two-qubit
state:

    S_min(C) = (5 - 3 sqrt5) C - sqrt5      (KCBS minimum)
    beta(C)  = 2 sqrt(1 + C^2)              (CHSH maximum)

The non-contextual KCBS bound S = -3 is reached at C* = 1/sqrt5, where
beta = sqrt(24/5). A CHSH value therefore falls into one of three
regimes:

    beta <= 2                   local and non-contextual
    2 < beta <= sqrt(24/5)      non-local and non-contextual
    sqrt(24/5) < beta <= 2 sqrt2  non-local and contextual
"""

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import List, Optional

import numpy as np
import pandas as pd

from contextBell.modules.chsh import (
    TSIRELSON_BOUND,
    beta_closed_form,
    chsh_max_correlation,
)
from contextBell.modules.kcbs import (
    DISCREPANCY_THRESHOLD,
    KCBS_CLASSICAL_BOUND,
    KCBS_QUANTUM_MINIMUM,
    SQRT5,
    kcbs_min_for_concurrence,
    s_min_closed_form,
)
from contextBell.modules.symmetric_map import embed, from_qutrit
from contextBell.utils.config import (
    OptimizerParams,
    get_tolerances,
    use_tolerances,
)
from contextBell.utils.errors import AppError, OutOfRangeError
from contextBell.utils.logger_config import logger

SCAN_COLUMNS = [
    "c",
    "s_min_closed",
    "s_min_oracle",
    "beta_closed",
    "beta_oracle",
    "regime",
    "oracle_status",
]


class Regime(enum.Enum):
    """The three regimes of a CHSH value."""

    LOCAL_NONCONTEXTUAL = "LOCAL_NONCONTEXTUAL"
    NONLOCAL_NONCONTEXTUAL = "NONLOCAL_NONCONTEXTUAL"
    NONLOCAL_CONTEXTUAL = "NONLOCAL_CONTEXTUAL"

    @property
    def index(self) -> int:
        return list(Regime).index(self)


@dataclass(frozen=True)
class Thresholds:
    """Regime boundaries and the concurrence where they meet."""

    beta_local: float = 2.0
    beta_noncontextual: float = float(np.sqrt(24.0 / 5.0))
    beta_tsirelson: float = float(TSIRELSON_BOUND)
    s_noncontextual: float = KCBS_CLASSICAL_BOUND
    c_star: float = float(1.0 / SQRT5)


THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class CorrelationPoint:
    """
    One row of a concurrence scan.

    Oracle values are None when the optimizer failed for this point;
    `oracle_status` then starts with "failed".
    """

    concurrence: float
    s_min_closed: float
    s_min_oracle: Optional[float]
    beta_closed: float
    beta_oracle: Optional[float]
    regime: Regime
    oracle_status: str = "ok"

    @property
    def s_min_deviation(self) -> Optional[float]:
        if self.s_min_oracle is None:
            return None
        return self.s_min_oracle - self.s_min_closed


def c_from_smin(s: float) -> float:
    """
    Invert the KCBS law: C = (s + sqrt5) / (5 - 3 sqrt5).

    Raises
    ------
    OutOfRangeError
        If s lies outside [5 - 4 sqrt5, -sqrt5].
    """
    slack = get_tolerances().boundary
    if not KCBS_QUANTUM_MINIMUM - slack <= s <= -SQRT5 + slack:
        raise OutOfRangeError(
            "c_from_smin",
            f"s = {s} not in [{KCBS_QUANTUM_MINIMUM:.6f}, {-SQRT5:.6f}]",
        )
    c = (s + SQRT5) / (5.0 - 3.0 * SQRT5)
    return float(min(max(c, 0.0), 1.0))


def c_from_beta(beta: float) -> float:
    """
    Invert the CHSH law: C = sqrt(beta^2/4 - 1).

    Raises
    ------
    OutOfRangeError
        If beta lies outside [2, 2 sqrt2].
    """
    slack = get_tolerances().boundary
    if not 2.0 - slack <= beta <= TSIRELSON_BOUND + slack:
        raise OutOfRangeError(
            "c_from_beta", f"beta = {beta} not in [2, {TSIRELSON_BOUND:.6f}]"
        )
    c = np.sqrt(max(beta * beta / 4.0 - 1.0, 0.0))
    return float(min(c, 1.0))


def smin_from_beta(beta: float) -> float:
    """Minimum KCBS value at the concurrence whose CHSH maximum is
    `beta`."""
    return s_min_closed_form(c_from_beta(beta))


def classify(beta: float) -> Regime:
    """
    Assign a CHSH value to its regime.

    Each regime is upper-inclusive: beta <= 2 is local, 2 < beta <=
    sqrt(24/5) is non-local and non-contextual, beyond that contextual.

    Raises
    ------
    OutOfRangeError
        If beta is negative or above 2 sqrt2 plus the Tsirelson slack.
    """
    tol = get_tolerances()
    if not 0.0 <= beta <= THRESHOLDS.beta_tsirelson + tol.tsirelson:
        raise OutOfRangeError(
            "classify",
            f"beta = {beta} not in [0, {THRESHOLDS.beta_tsirelson:.6f}]",
        )
    if beta <= THRESHOLDS.beta_local + tol.boundary:
        return Regime.LOCAL_NONCONTEXTUAL
    if beta <= THRESHOLDS.beta_noncontextual + tol.boundary:
        return Regime.NONLOCAL_NONCONTEXTUAL
    return Regime.NONLOCAL_CONTEXTUAL


def regime_distances(beta: float) -> dict:
    """Signed distances beta - threshold for the three CHSH thresholds."""
    return {
        "beta_local": beta - THRESHOLDS.beta_local,
        "beta_noncontextual": beta - THRESHOLDS.beta_noncontextual,
        "beta_tsirelson": beta - THRESHOLDS.beta_tsirelson,
    }


def scan_point(
    concurrence: float, opt: OptimizerParams, tolerances=None
) -> CorrelationPoint:
    """
    Closed-form and oracle values at one concurrence.

    The KCBS oracle is `kcbs_min_for_concurrence`; the CHSH oracle is the
    correlation-matrix maximum of the KCBS argmin state embedded in two
    qubits. An optimizer failure is recorded in `oracle_status` instead of
    being raised.
    """
    with use_tolerances(tolerances or get_tolerances()):
        s_closed = s_min_closed_form(concurrence)
        beta_closed = beta_closed_form(concurrence)
        regime = classify(beta_closed)
        try:
            value, argmin = kcbs_min_for_concurrence(concurrence, opt)
            beta_oracle = chsh_max_correlation(embed(from_qutrit(argmin)))
        except AppError as e:
            logger.warning(f"Scan point C={concurrence:.6g} failed: {e}")
            return CorrelationPoint(
                concurrence=concurrence,
                s_min_closed=s_closed,
                s_min_oracle=None,
                beta_closed=beta_closed,
                beta_oracle=None,
                regime=regime,
                oracle_status=f"failed: {e}",
            )

        status = "ok"
        if value < s_closed - DISCREPANCY_THRESHOLD:
            status = "discrepancy"
        return CorrelationPoint(
            concurrence=concurrence,
            s_min_closed=s_closed,
            s_min_oracle=value,
            beta_closed=beta_closed,
            beta_oracle=beta_oracle,
            regime=regime,
            oracle_status=status,
        )


def concurrence_grid(
    c_min: float, c_max: float, steps: int, include_threshold=False
) -> List[float]:
    """
    Uniform grid over [c_min, c_max] with both endpoints; optionally the
    threshold concurrence 1/sqrt5 is inserted when it lies inside.

    Raises
    ------
    OutOfRangeError
        If the range is not within [0, 1], c_min > c_max, steps < 1, or
        steps == 1 on a range with distinct endpoints.
    """
    if not 0.0 <= c_min <= c_max <= 1.0:
        raise OutOfRangeError(
            "scan", f"need 0 <= c_min <= c_max <= 1, got {c_min}, {c_max}"
        )
    if steps < 1:
        raise OutOfRangeError("scan", f"steps = {steps} must be >= 1")
    if steps == 1 and c_min != c_max:
        raise OutOfRangeError(
            "scan", f"one step cannot cover both ends of [{c_min}, {c_max}]"
        )
    grid = [float(c) for c in np.linspace(c_min, c_max, steps)]

    c_star = THRESHOLDS.c_star
    if include_threshold and c_min <= c_star <= c_max:
        tol = get_tolerances().boundary
        if not any(abs(c - c_star) < tol for c in grid):
            grid = sorted(grid + [c_star])
    return [float(c) for c in grid]


def scan(
    c_min: float,
    c_max: float,
    steps: int,
    opt: Optional[OptimizerParams] = None,
    include_threshold: bool = False,
) -> List[CorrelationPoint]:
    """
    Evaluate both laws and both oracles on a concurrence grid.

    Points are independent; with `opt.workers > 1` they run in worker
    processes (each point's restarts then run serially). The output is
    ordered by grid index.

    Parameters
    ----------
    c_min, c_max : float
        Concurrence range, 0 <= c_min <= c_max <= 1.
    steps : int
        Number of grid points including both endpoints.
    opt : OptimizerParams, optional
        Optimizer settings for the KCBS oracle.
    include_threshold : bool, optional
        Insert the C* = 1/sqrt5 row when it lies in range.

    Returns
    -------
    list of CorrelationPoint
        One record per grid point.
    """
    opt = opt or OptimizerParams()
    grid = concurrence_grid(c_min, c_max, steps, include_threshold)
    logger.info(f"Scanning {len(grid)} concurrences in [{c_min}, {c_max}]")

    if opt.workers > 1 and len(grid) > 1:
        task = partial(
            scan_point,
            opt=replace(opt, workers=1),
            tolerances=get_tolerances(),
        )
        with ProcessPoolExecutor(max_workers=opt.workers) as pool:
            points = list(pool.map(task, grid))
    else:
        points = [scan_point(c, opt) for c in grid]

    failed = sum(p.oracle_status.startswith("failed") for p in points)
    if failed:
        logger.warning(f"{failed}/{len(points)} scan points failed")
    return points


def points_to_frame(points: List[CorrelationPoint]) -> pd.DataFrame:
    """Tabulate scan points with the columns of SCAN_COLUMNS."""
    rows = []
    for point in points:
        rows.append(
            {
                "c": point.concurrence,
                "s_min_closed": point.s_min_closed,
                "s_min_oracle": point.s_min_oracle,
                "beta_closed": point.beta_closed,
                "beta_oracle": point.beta_oracle,
                "regime": point.regime.value,
                "oracle_status": point.oracle_status,
            }
        )
    return pd.DataFrame(rows, columns=SCAN_COLUMNS)
