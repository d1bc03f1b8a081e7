"""
Tests for kcbs.

Covers:
- pentagram geometry and observable construction
- kcbs_value at the reference states and the quantum lower bound
- rotation covariance
- the closed-form minimum and the constrained optimizer
"""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from contextBell.modules import kcbs
from contextBell.modules.entanglement import concurrence_symmetric
from contextBell.modules.quantum_core import (
    commutator_norm,
    eigensystem,
    expectation,
)
from contextBell.modules.symmetric_map import (
    QutritPure,
    from_qutrit,
    random_symmetric,
    to_qutrit,
)
from contextBell.utils.errors import (
    InvalidConcurrenceError,
    InvalidPentagramError,
    NotNormalizedError,
    NotUnitError,
)

SQRT5 = np.sqrt(5)


def _qutrit_concurrence(q):
    s = from_qutrit(q)
    return concurrence_symmetric(s.a, s.b, s.c).value


class TestDirection3:
    """Tests for Direction3"""

    def test_rejects_non_unit(self):
        with pytest.raises(NotUnitError):
            kcbs.Direction3(1, 1, 0)

    def test_from_vector_normalises(self):
        d = kcbs.Direction3.from_vector([0, 3, 4])
        assert (d.x, d.y, d.z) == pytest.approx((0, 0.6, 0.8))

    def test_from_angles(self):
        d = kcbs.Direction3.from_angles(np.pi / 2, 0)
        assert d.as_array() == pytest.approx([1, 0, 0], abs=1e-15)


class TestPentagram:
    """Tests for standard_pentagram and PentagramConfig"""

    def test_adjacent_directions_orthogonal(self):
        p = kcbs.standard_pentagram()
        for i in range(5):
            dot = p.directions[i].as_array() @ p.directions[
                (i + 1) % 5
            ].as_array()
            assert abs(dot) < 1e-12

    def test_cos_squared(self):
        """Every direction makes cos^2 = 1/sqrt5 with the z axis."""
        for d in kcbs.standard_pentagram().directions:
            assert d.z**2 == pytest.approx(1 / SQRT5, abs=1e-12)

    def test_wrong_count(self):
        directions = kcbs.standard_pentagram().directions[:4]
        with pytest.raises(InvalidPentagramError):
            kcbs.PentagramConfig(directions)

    def test_non_orthogonal(self):
        x = kcbs.Direction3(1, 0, 0)
        with pytest.raises(InvalidPentagramError):
            kcbs.PentagramConfig((x,) * 5)

    def test_rotated_stays_valid(self):
        rotation = Rotation.from_rotvec([0.3, -0.2, 0.9]).as_matrix()
        kcbs.standard_pentagram().rotated(rotation)


class TestKcbsObservables:
    """Tests for kcbs_observables"""

    def test_spectrum(self, kcbs_obs):
        """Each A_i has eigenvalues -1, +1, +1."""
        for a_op in kcbs_obs.a_ops:
            assert eigensystem(a_op).spectrum == pytest.approx(
                (-1.0, 1.0, 1.0)
            )

    def test_adjacent_commute(self, kcbs_obs):
        for i in range(5):
            assert (
                commutator_norm(kcbs_obs.a_ops[i], kcbs_obs.a_ops[(i + 1) % 5])
                < 1e-12
            )

    def test_spin_operator_spectrum(self):
        spin = kcbs.spin1_operator(kcbs.Direction3(0, 0, 1))
        assert eigensystem(spin).eigenvalues == pytest.approx((-1, 0, 1))


class TestKcbsValue:
    """Tests for kcbs_value"""

    def test_neutral_state_reaches_quantum_minimum(self, kcbs_obs):
        """|0> gives 5 - 4 sqrt5."""
        value = kcbs.kcbs_value(QutritPure.basis(0), kcbs_obs)
        assert value == pytest.approx(5 - 4 * SQRT5, abs=1e-9)
        assert kcbs.is_contextual(value)

    def test_polarised_state(self, kcbs_obs):
        """|1> gives 2 sqrt5 - 5, above the classical bound."""
        value = kcbs.kcbs_value(QutritPure.basis(1), kcbs_obs)
        assert value == pytest.approx(2 * SQRT5 - 5, abs=1e-9)
        assert value >= kcbs.KCBS_CLASSICAL_BOUND
        assert not kcbs.is_contextual(value)

    def test_never_below_quantum_minimum(self, kcbs_obs, rng):
        for _ in range(100):
            q = to_qutrit(random_symmetric(rng))
            assert kcbs.kcbs_value(q, kcbs_obs) >= (
                kcbs.KCBS_QUANTUM_MINIMUM - 1e-9
            )

    def test_matches_summed_operator(self, kcbs_obs, rng):
        q = to_qutrit(random_symmetric(rng))
        operator = kcbs.kcbs_operator(kcbs_obs)
        assert kcbs.kcbs_value(q, kcbs_obs) == pytest.approx(
            expectation(q, operator), abs=1e-12
        )

    def test_unnormalised_state(self, kcbs_obs):
        from contextBell.modules.quantum_core import PureState

        with pytest.raises(NotNormalizedError):
            kcbs.kcbs_value(PureState(np.array([1, 1, 0])), kcbs_obs)

    def test_rotation_covariance(self, kcbs_obs, rng):
        """Rotating the state and all directions leaves the value
        unchanged."""
        pentagram = kcbs.standard_pentagram()
        for _ in range(5):
            rotvec = rng.normal(size=3)
            rotation = Rotation.from_rotvec(rotvec).as_matrix()
            unitary = kcbs.spin1_rotation(rotvec)
            rotated_obs = kcbs.kcbs_observables(pentagram.rotated(rotation))

            q = to_qutrit(random_symmetric(rng))
            rotated = QutritPure(unitary @ q.amplitudes)
            assert kcbs.kcbs_value(rotated, rotated_obs) == pytest.approx(
                kcbs.kcbs_value(q, kcbs_obs), abs=1e-9
            )


class TestClosedForm:
    """Tests for s_min_closed_form and optimal_state_for_concurrence"""

    @pytest.mark.parametrize(
        "c, expected",
        [
            (0.0, -SQRT5),
            (1.0, 5 - 4 * SQRT5),
            (1 / SQRT5, -3.0),
        ],
    )
    def test_reference_values(self, c, expected):
        assert kcbs.s_min_closed_form(c) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("c", [-0.01, 1.01])
    def test_invalid_concurrence(self, c):
        with pytest.raises(InvalidConcurrenceError):
            kcbs.s_min_closed_form(c)

    @pytest.mark.parametrize("c", [0.0, 0.3, 1 / SQRT5, 0.8, 1.0])
    def test_optimal_state(self, c, kcbs_obs):
        """The analytic state has concurrence C and attains the law."""
        q = kcbs.optimal_state_for_concurrence(c)
        assert _qutrit_concurrence(q) == pytest.approx(c, abs=1e-12)
        assert kcbs.kcbs_value(q, kcbs_obs) == pytest.approx(
            kcbs.s_min_closed_form(c), abs=1e-12
        )

    def test_optimal_state_at_one_is_neutral(self):
        q = kcbs.optimal_state_for_concurrence(1.0)
        assert np.allclose(
            np.abs(q.amplitudes), [0, 1, 0], atol=1e-12
        )


class TestProjectToConcurrence:
    """Tests for project_to_concurrence"""

    @pytest.mark.parametrize("c", [0.0, 0.25, 0.5, 1.0])
    def test_lands_on_surface(self, c, rng):
        for _ in range(10):
            raw = rng.normal(size=3) + 1j * rng.normal(size=3)
            raw = raw / np.linalg.norm(raw)
            projected = kcbs.project_to_concurrence(raw, c)
            assert np.linalg.norm(projected) == pytest.approx(1.0, abs=1e-12)
            q = QutritPure(projected)
            assert _qutrit_concurrence(q) == pytest.approx(c, abs=1e-10)


class TestKcbsMinForConcurrence:
    """Tests for kcbs_min_for_concurrence"""

    @pytest.mark.parametrize("c", [0.0, 1.0])
    def test_endpoints(self, c, fast_opt):
        value, argmin = kcbs.kcbs_min_for_concurrence(c, fast_opt)
        assert value == pytest.approx(kcbs.s_min_closed_form(c), abs=1e-6)
        assert _qutrit_concurrence(argmin) == pytest.approx(c, abs=1e-10)

    @pytest.mark.parametrize("c", np.round(np.linspace(0, 1, 11), 1))
    def test_matches_closed_form(self, c, fast_opt):
        value, argmin = kcbs.kcbs_min_for_concurrence(c, fast_opt)
        assert value == pytest.approx(kcbs.s_min_closed_form(c), abs=1e-3)
        assert _qutrit_concurrence(argmin) == pytest.approx(c, abs=1e-10)

    def test_not_below_closed_form(self, fast_opt):
        """No state found beats the affine law."""
        c = 0.3
        value, _ = kcbs.kcbs_min_for_concurrence(c, fast_opt)
        assert value >= kcbs.s_min_closed_form(c) - 1e-6

    def test_deterministic(self, fast_opt):
        first = kcbs.kcbs_min_for_concurrence(0.7, fast_opt)
        second = kcbs.kcbs_min_for_concurrence(0.7, fast_opt)
        assert first.value == second.value
        assert np.array_equal(
            first.argmin.amplitudes, second.argmin.amplitudes
        )

    def test_invalid_concurrence(self, fast_opt):
        with pytest.raises(InvalidConcurrenceError):
            kcbs.kcbs_min_for_concurrence(1.2, fast_opt)

    def test_parallel_matches_serial(self, fast_opt, parallel_opt):
        serial = kcbs.kcbs_min_for_concurrence(0.4, fast_opt)
        parallel = kcbs.kcbs_min_for_concurrence(0.4, parallel_opt)
        assert parallel.value == serial.value
        assert np.array_equal(
            parallel.argmin.amplitudes, serial.argmin.amplitudes
        )
