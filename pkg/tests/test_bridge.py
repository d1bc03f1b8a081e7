"""
Tests for bridge.

Covers:
- inversion of both laws and the threshold values
- the regime partition, including inclusive boundaries
- concurrence grids, scan points and the scan table
"""

import numpy as np
import pytest

from contextBell.modules import bridge
from contextBell.modules.bridge import Regime
from contextBell.modules.chsh import beta_closed_form
from contextBell.modules.kcbs import s_min_closed_form
from contextBell.utils.errors import ConvergenceFailureError, OutOfRangeError

SQRT5 = np.sqrt(5)
BETA_STAR = np.sqrt(24 / 5)


class TestInversions:
    """Tests for c_from_smin, c_from_beta and smin_from_beta"""

    def test_threshold_concurrence(self):
        """S = -3 at C* = 1/sqrt5 (about 0.447)."""
        assert bridge.c_from_smin(-3.0) == pytest.approx(1 / SQRT5, abs=1e-12)

    def test_threshold_beta(self):
        assert bridge.c_from_beta(BETA_STAR) == pytest.approx(
            1 / SQRT5, abs=1e-12
        )
        assert beta_closed_form(1 / SQRT5) == pytest.approx(2.19089, abs=1e-5)

    def test_smin_from_beta(self):
        assert bridge.smin_from_beta(BETA_STAR) == pytest.approx(
            -3.0, abs=1e-12
        )

    @pytest.mark.parametrize("c", [0.0, 0.2, 0.6, 1.0])
    def test_round_trips(self, c):
        assert bridge.c_from_smin(s_min_closed_form(c)) == pytest.approx(c)
        assert bridge.c_from_beta(beta_closed_form(c)) == pytest.approx(c)

    @pytest.mark.parametrize("s", [-4.0, -2.0])
    def test_smin_out_of_range(self, s):
        with pytest.raises(OutOfRangeError):
            bridge.c_from_smin(s)

    @pytest.mark.parametrize("beta", [1.9, 2.9])
    def test_beta_out_of_range(self, beta):
        with pytest.raises(OutOfRangeError):
            bridge.c_from_beta(beta)


class TestClassify:
    """Tests for classify and regime_distances"""

    @pytest.mark.parametrize(
        "beta, expected",
        [
            (1.5, Regime.LOCAL_NONCONTEXTUAL),
            (1.9, Regime.LOCAL_NONCONTEXTUAL),
            (2.0, Regime.LOCAL_NONCONTEXTUAL),
            (2.1, Regime.NONLOCAL_NONCONTEXTUAL),
            (2.19089, Regime.NONLOCAL_NONCONTEXTUAL),
            (BETA_STAR, Regime.NONLOCAL_NONCONTEXTUAL),
            (2.191, Regime.NONLOCAL_CONTEXTUAL),
            (2.2, Regime.NONLOCAL_CONTEXTUAL),
            (2 * np.sqrt(2), Regime.NONLOCAL_CONTEXTUAL),
        ],
    )
    def test_partition(self, beta, expected):
        assert bridge.classify(beta) is expected

    def test_closed_form_at_threshold_is_inclusive(self):
        """beta(1/sqrt5) sits on the non-contextual side."""
        beta = beta_closed_form(1 / SQRT5)
        assert bridge.classify(beta) is Regime.NONLOCAL_NONCONTEXTUAL

    @pytest.mark.parametrize("beta", [-0.1, 3.0])
    def test_out_of_range(self, beta):
        with pytest.raises(OutOfRangeError, match="2.828"):
            bridge.classify(beta)

    def test_semi_quantum_window(self):
        """Below C*, states are non-local but not contextual."""
        c = 0.4
        assert s_min_closed_form(c) > -3
        assert beta_closed_form(c) > 2
        assert bridge.classify(beta_closed_form(c)) is (
            Regime.NONLOCAL_NONCONTEXTUAL
        )

    def test_regime_distances(self):
        distances = bridge.regime_distances(2.0)
        assert distances["beta_local"] == 0.0
        assert distances["beta_noncontextual"] == pytest.approx(2 - BETA_STAR)
        assert distances["beta_tsirelson"] < 0

    def test_regime_index_order(self):
        assert [r.index for r in Regime] == [0, 1, 2]


class TestConcurrenceGrid:
    """Tests for concurrence_grid"""

    def test_endpoints_included(self):
        grid = bridge.concurrence_grid(0, 1, 11)
        assert len(grid) == 11
        assert grid[0] == 0.0 and grid[-1] == 1.0

    def test_single_point(self):
        assert bridge.concurrence_grid(0.5, 0.5, 1) == [0.5]

    def test_threshold_inserted(self):
        grid = bridge.concurrence_grid(0, 1, 11, include_threshold=True)
        assert len(grid) == 12
        assert any(abs(c - 1 / SQRT5) < 1e-15 for c in grid)
        assert grid == sorted(grid)

    def test_threshold_outside_range_ignored(self):
        grid = bridge.concurrence_grid(0.5, 1, 3, include_threshold=True)
        assert len(grid) == 3

    @pytest.mark.parametrize(
        "c_min, c_max, steps",
        [
            (-0.1, 1, 5),
            (0, 1.5, 5),
            (0.8, 0.2, 5),
            (0, 1, 0),
            (0.2, 0.8, 1),
        ],
    )
    def test_invalid(self, c_min, c_max, steps):
        with pytest.raises(OutOfRangeError):
            bridge.concurrence_grid(c_min, c_max, steps)


class TestScan:
    """Tests for scan_point, scan and points_to_frame"""

    def test_scan_endpoints(self, fast_opt):
        points = bridge.scan(0, 1, 3, fast_opt)
        assert [p.concurrence for p in points] == [0.0, 0.5, 1.0]

        first, last = points[0], points[-1]
        assert first.s_min_closed == pytest.approx(-SQRT5)
        assert first.beta_closed == pytest.approx(2.0)
        assert first.regime is Regime.LOCAL_NONCONTEXTUAL
        assert last.s_min_closed == pytest.approx(5 - 4 * SQRT5)
        assert last.regime is Regime.NONLOCAL_CONTEXTUAL

        for p in points:
            assert p.oracle_status == "ok"
            assert p.s_min_deviation == pytest.approx(0, abs=1e-6)
            assert p.beta_oracle == pytest.approx(p.beta_closed, abs=1e-6)

    def test_parallel_matches_serial(self, fast_opt, parallel_opt):
        """Worker processes give the same rows, in grid order."""
        serial = bridge.scan(0, 1, 3, fast_opt, include_threshold=True)
        parallel = bridge.scan(0, 1, 3, parallel_opt, include_threshold=True)
        assert parallel == serial

    def test_failed_point_is_recorded(self, fast_opt, monkeypatch):
        """An optimizer failure marks the row instead of aborting."""

        def failing(*args, **kwargs):
            raise ConvergenceFailureError("stub search")

        monkeypatch.setattr(bridge, "kcbs_min_for_concurrence", failing)
        point = bridge.scan_point(0.3, fast_opt)
        assert point.oracle_status.startswith("failed")
        assert point.s_min_oracle is None
        assert point.s_min_deviation is None
        assert point.s_min_closed == pytest.approx(s_min_closed_form(0.3))

    def test_frame_columns(self, fast_opt, monkeypatch):
        def failing(*args, **kwargs):
            raise ConvergenceFailureError("stub search")

        monkeypatch.setattr(bridge, "kcbs_min_for_concurrence", failing)
        frame = bridge.points_to_frame(bridge.scan(0, 1, 4, fast_opt))
        assert list(frame.columns) == bridge.SCAN_COLUMNS
        assert len(frame) == 4
        assert frame["regime"].iloc[-1] == "NONLOCAL_CONTEXTUAL"
