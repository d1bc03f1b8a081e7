"""
Multi-start derivative-free minimisation shared by the KCBS and CHSH
oracles.

Each restart `k` draws its start point from its own seeded stream
(seed, k), runs a Nelder-Mead search and returns a `RestartResult`.
Restarts may run in worker processes; results are always reduced in
restart order, so serial and parallel runs give identical output.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.optimize import minimize

from contextBell.utils.config import OptimizerParams
from contextBell.utils.errors import ConvergenceFailureError
from contextBell.utils.logger_config import logger


@dataclass(frozen=True)
class RestartResult:
    """Outcome of one local search."""

    index: int
    value: float
    x: np.ndarray
    evaluations: int
    converged: bool


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Return a seeded generator over the counter-based Philox bit
    generator.

    Parameters
    ----------
    seed : int
        Master seed (non-negative).
    *stream : int
        Extra words selecting an independent stream, e.g. a restart
        index.
    """
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, *stream]))
    )


def local_search(
    objective: Callable, x0: np.ndarray, opt: OptimizerParams, index: int
) -> RestartResult:
    """
    Run one Nelder-Mead search from `x0`.

    Parameters
    ----------
    objective : callable
        Function of a parameter vector, to be minimised.
    x0 : numpy.ndarray
        Start point.
    opt : OptimizerParams
        Supplies the tolerance and the evaluation budget.
    index : int
        Restart index recorded in the result.

    Returns
    -------
    RestartResult
        Best value and point found.
    """
    result = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "xatol": opt.tolerance,
            "fatol": opt.tolerance,
            "maxfev": opt.max_evals,
            "adaptive": True,
        },
    )
    return RestartResult(
        index=index,
        value=float(result.fun),
        x=np.asarray(result.x),
        evaluations=int(result.nfev),
        converged=bool(result.success),
    )


def run_restarts(task: Callable, opt: OptimizerParams) -> List[RestartResult]:
    """
    Run `task(k)` for every restart index, serially or in worker
    processes, and return the results ordered by index.

    `task` must be picklable (a module-level function or a
    functools.partial of one) when `opt.workers > 1`.
    """
    indices = range(opt.restarts)
    if opt.workers > 1 and opt.restarts > 1:
        with ProcessPoolExecutor(max_workers=opt.workers) as pool:
            results = list(pool.map(task, indices))
    else:
        results = [task(k) for k in indices]

    unconverged = sum(not r.converged for r in results)
    if unconverged:
        logger.info(
            f"{unconverged}/{len(results)} restarts hit the evaluation "
            f"budget of {opt.max_evals}"
        )
    return results


def check_stability(
    results: List[RestartResult], opt: OptimizerParams, context: str
) -> float:
    """
    Return the best (lowest) value and verify that the final restart did
    not improve the running best by more than the stability tolerance.

    Raises
    ------
    ConvergenceFailureError
        If the last restart still improved the best value materially.
    """
    values = np.array([r.value for r in results])
    best = float(values.min())
    if len(values) > 1:
        before_last = float(values[:-1].min())
        change = before_last - best
        if change > opt.stability_tolerance:
            raise ConvergenceFailureError(
                context,
                f"best value moved by {change:.3e} in the final restart",
            )
    return best
