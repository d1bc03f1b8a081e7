"""
Tests for entanglement.

Covers:
- concurrence_pure on product and Bell states
- concurrence_symmetric and its agreement with the embedded state
- the spin-flip form and invariance under local unitaries
"""

import numpy as np
import pytest
from scipy.stats import unitary_group

from contextBell.modules.entanglement import (
    Concurrence,
    concurrence_pure,
    concurrence_spin_flip,
    concurrence_symmetric,
)
from contextBell.modules.quantum_core import PureState
from contextBell.modules.symmetric_map import embed, random_symmetric
from contextBell.utils.errors import (
    DimensionMismatchError,
    InvalidConcurrenceError,
    NotNormalizedError,
)

SQRT_HALF = 1 / np.sqrt(2)


def _random_state(rng):
    values = rng.normal(size=4) + 1j * rng.normal(size=4)
    return PureState.from_amplitudes(values)


class TestConcurrencePure:
    """Tests for concurrence_pure"""

    @pytest.mark.parametrize(
        "amplitudes, expected",
        [
            ([1, 0, 0, 0], 0.0),
            ([SQRT_HALF, 0, 0, SQRT_HALF], 1.0),
            ([0, SQRT_HALF, SQRT_HALF, 0], 1.0),
            ([0, SQRT_HALF, -SQRT_HALF, 0], 1.0),
        ],
    )
    def test_reference_states(self, amplitudes, expected):
        state = PureState(np.array(amplitudes))
        assert concurrence_pure(state).value == pytest.approx(
            expected, abs=1e-12
        )

    def test_not_normalised(self):
        with pytest.raises(NotNormalizedError):
            concurrence_pure(PureState(np.array([1, 1, 0, 0])))

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatchError):
            concurrence_pure(PureState(np.array([1, 0, 0])))

    def test_local_unitary_invariance(self, rng):
        """C is unchanged by U (x) V."""
        for _ in range(10):
            state = _random_state(rng)
            u = unitary_group.rvs(2, random_state=rng)
            v = unitary_group.rvs(2, random_state=rng)
            rotated = PureState(np.kron(u, v) @ state.amplitudes)
            assert concurrence_pure(rotated).value == pytest.approx(
                concurrence_pure(state).value, abs=1e-10
            )

    def test_spin_flip_form_agrees(self, rng):
        for _ in range(10):
            state = _random_state(rng)
            assert concurrence_spin_flip(state).value == pytest.approx(
                concurrence_pure(state).value, abs=1e-12
            )


class TestConcurrenceSymmetric:
    """Tests for concurrence_symmetric"""

    @pytest.mark.parametrize(
        "abc, expected",
        [
            ((1, 0, 0), 0.0),
            ((0, 0, 1), 0.0),
            ((0, 1, 0), 1.0),
            ((SQRT_HALF, 0, SQRT_HALF), 1.0),
        ],
    )
    def test_reference_states(self, abc, expected):
        assert concurrence_symmetric(*abc).value == pytest.approx(
            expected, abs=1e-12
        )

    def test_matches_embedded_state(self, rng):
        """|2ac - b^2| equals 2|ad - bc| of the embedded vector."""
        for _ in range(50):
            s = random_symmetric(rng)
            assert concurrence_symmetric(s.a, s.b, s.c).value == (
                pytest.approx(concurrence_pure(embed(s)).value, abs=1e-12)
            )

    def test_not_normalised(self):
        with pytest.raises(NotNormalizedError):
            concurrence_symmetric(1, 1, 0)


class TestConcurrenceRecord:
    """Tests for the Concurrence record"""

    @pytest.mark.parametrize("value", [-0.1, 1.5])
    def test_out_of_range(self, value):
        with pytest.raises(InvalidConcurrenceError):
            Concurrence(value)

    def test_round_off_clamped(self):
        assert Concurrence.checked(1 + 1e-13).value == 1.0
        assert Concurrence.checked(-1e-13).value == 0.0

    def test_large_excursion_rejected(self):
        with pytest.raises(InvalidConcurrenceError):
            Concurrence.checked(-1e-3)

    def test_float_conversion(self):
        assert float(Concurrence(0.25)) == 0.25
