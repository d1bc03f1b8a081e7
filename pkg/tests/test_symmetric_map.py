"""
Tests for symmetric_map.

Covers:
- SymmetricTwoQubit / QutritPure validation
- embed, to_qutrit, from_qutrit
- project_symmetric, including rejection of antisymmetric states
"""

import numpy as np
import pytest

from contextBell.modules.quantum_core import PureState
from contextBell.modules.symmetric_map import (
    QutritPure,
    SymmetricTwoQubit,
    embed,
    from_qutrit,
    project_symmetric,
    random_symmetric,
    to_qutrit,
)
from contextBell.utils.errors import (
    DimensionMismatchError,
    NotNormalizedError,
    NotSymmetricError,
)


class TestSymmetricTwoQubit:
    """Tests for SymmetricTwoQubit"""

    def test_rejects_unnormalised(self):
        with pytest.raises(NotNormalizedError):
            SymmetricTwoQubit(1, 1, 0)

    def test_normalized_constructor(self):
        s = SymmetricTwoQubit.normalized(1, 1j, 1)
        assert np.linalg.norm(s.as_array()) == pytest.approx(1.0)

    def test_amplitudes_are_complex(self):
        assert isinstance(SymmetricTwoQubit(1, 0, 0).a, complex)


class TestEmbed:
    """Tests for embed"""

    def test_neutral_state(self):
        """b = 1 spreads equally over |01> and |10>."""
        state = embed(SymmetricTwoQubit(0, 1, 0))
        expected = [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0]
        assert np.allclose(state.amplitudes, expected)

    def test_norm_preserved(self, rng):
        for _ in range(20):
            assert embed(random_symmetric(rng)).norm == pytest.approx(1.0)

    def test_project_inverts_embed(self, rng):
        for _ in range(20):
            s = random_symmetric(rng)
            back = project_symmetric(embed(s))
            assert np.allclose(back.as_array(), s.as_array(), atol=1e-12)


class TestQutrit:
    """Tests for to_qutrit, from_qutrit and QutritPure"""

    def test_neutral_state_is_m_zero(self):
        q = to_qutrit(SymmetricTwoQubit(0, 1, 0))
        assert np.allclose(q.amplitudes, QutritPure.basis(0).amplitudes)

    @pytest.mark.parametrize("m, index", [(1, 0), (0, 1), (-1, 2)])
    def test_basis_order(self, m, index):
        """Basis order is (|1>, |0>, |-1>)."""
        assert QutritPure.basis(m).amplitudes[index] == 1

    def test_round_trip(self, rng):
        s = random_symmetric(rng)
        assert np.allclose(from_qutrit(to_qutrit(s)).as_array(), s.as_array())

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatchError):
            QutritPure(np.array([1, 0]))

    def test_unnormalised(self):
        with pytest.raises(NotNormalizedError):
            QutritPure(np.array([1, 1, 0]))


class TestProjectSymmetric:
    """Tests for project_symmetric"""

    def test_singlet_rejected(self):
        singlet = PureState(np.array([0, 1, -1, 0]) / np.sqrt(2))
        with pytest.raises(NotSymmetricError):
            project_symmetric(singlet)

    def test_tolerance_parameter(self):
        """A small antisymmetric part passes a loose tolerance."""
        state = PureState.from_amplitudes([0, 1, 1 + 1e-6, 0])
        with pytest.raises(NotSymmetricError):
            project_symmetric(state)
        s = project_symmetric(state, tol=1e-5)
        assert abs(s.b) == pytest.approx(1.0, abs=1e-9)

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatchError):
            project_symmetric(PureState(np.array([1, 0, 0])))
