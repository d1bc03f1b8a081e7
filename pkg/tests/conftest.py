"""Shared fixtures: common states, the standard KCBS scenario and
reduced optimizer settings."""

from dataclasses import replace

import numpy as np
import pytest

from contextBell.modules.kcbs import kcbs_observables, standard_pentagram
from contextBell.modules.quantum_core import PureState
from contextBell.utils.config import OptimizerParams
from contextBell.utils.optimize_helpers import make_rng


@pytest.fixture
def fast_opt():
    """Fewer restarts than the default so optimizer tests stay quick."""
    return OptimizerParams(restarts=12, seed=0)


@pytest.fixture
def parallel_opt(fast_opt):
    """The same search as `fast_opt`, spread over two worker processes."""
    return replace(fast_opt, workers=2)


@pytest.fixture
def bell_state():
    """(|00> + |11>)/sqrt2."""
    return PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))


@pytest.fixture
def product_state():
    """|00>."""
    return PureState(np.array([1, 0, 0, 0]))


@pytest.fixture(scope="module")
def kcbs_obs():
    """Observables of the standard pentagram."""
    return kcbs_observables(standard_pentagram())


@pytest.fixture
def rng():
    return make_rng(1234)
