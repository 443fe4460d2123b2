import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bernrand import partition as pt
from bernrand.measures import BitString
from bernrand.oracle import brute_width_ratio, partition_is_valid


def _anchor(n, s):
    # independent evaluation, one anchor at a time
    return n / 2 * (1 - math.cos(s / math.sqrt(n)))


class TestAnchors:
    def test_n4_values(self):
        expected = [0.0, 0.2448, 0.9194, 1.8585, 2.8323, 3.6023, 3.9800]
        assert pt.anchors(4) == pytest.approx(expected, abs=5e-5)

    @given(st.integers(1, 10**4))
    def test_identity_with_theta(self, n):
        s = np.arange(pt.num_anchors(n))
        assert np.abs(pt.anchors(n) - pt.theta(n, s / 2)).max() < 1e-9

    @given(st.integers(1, 5000))
    def test_matches_scalar_formula(self, n):
        a = pt.anchors(n)
        for s in (0, len(a) // 2, len(a) - 1):
            assert a[s] == pytest.approx(_anchor(n, s), abs=1e-9)


class TestCells:
    def test_n4_singletons(self):
        part = pt.build_partition(4)
        assert part.num_cells == 5
        assert part.cells() == [range(k, k + 1) for k in range(5)]

    def test_n1(self):
        assert pt.build_partition(1).cells() == [range(0, 1), range(1, 2)]

    def test_cell_of_examples(self):
        assert pt.cell_of(pt.build_partition(4), 2) == range(2, 3)
        part = pt.build_partition(100)
        assert pt.cell_of(part, 0) == range(0, 1)
        penultimate = pt.cell_of(part, 99)
        assert penultimate == part.cells()[-2]
        assert penultimate.start >= 1 and penultimate.stop - 1 <= 99

    def test_cell_of_range_error(self):
        with pytest.raises(ValueError):
            pt.cell_of(pt.build_partition(4), 5)

    @settings(max_examples=60)
    @given(st.integers(1, 10**4))
    def test_partition_valid(self, n):
        assert partition_is_valid(n)

    @given(st.integers(1, 3000), st.data())
    def test_cell_of_agrees_with_cells(self, n, data):
        part = pt.build_partition(n)
        k = data.draw(st.integers(0, n))
        cell = pt.cell_of(part, k)
        assert k in cell and cell in part.cells()

    def test_lazy_count_matches_materialized(self):
        n = pt.LAZY_CELLS_ABOVE + 7
        lazy = pt.build_partition(n)
        assert lazy.lazy
        _, lo, _ = pt.kernels.cell_bounds(pt.anchors(n), n)
        assert lazy.num_cells == len(lo)
        with pytest.raises(ValueError):
            lazy.cells()
        assert pt.cell_of(lazy, 0) == range(0, 1) and pt.cell_of(lazy, n) == range(n, n + 1)


class TestWidth:
    def test_center_n4(self):
        assert pt.cell_width_ratio(4, 2) == 1.0

    @pytest.mark.parametrize("n,k", [(10000, 5000), (10000, 1), (100, 50)])
    def test_bounded(self, n, k):
        r = pt.cell_width_ratio(n, k)
        assert 1 / 8 <= r <= 8
        assert r == pytest.approx(brute_width_ratio(n, k))

    def test_endpoints_undefined(self):
        with pytest.raises(ValueError):
            pt.cell_width_ratio(10, 0)
        with pytest.raises(ValueError):
            pt.cell_width_ratio(10, 10)

    @pytest.mark.parametrize("n", [10, 100, 1000])
    def test_vectorized_matches_scalar(self, n):
        part = pt.build_partition(n)
        r = pt.width_ratios(part)
        for k in (1, n // 3, n // 2, n - 1):
            assert r[k - 1] == pytest.approx(pt.cell_width_ratio(n, k, part))


class TestEstimator:
    def test_a_hat(self):
        assert pt.a_hat(7, 0) == 0.0
        assert pt.a_hat(4, 2) == pytest.approx(math.pi / 2)
        assert pt.a_hat(9, 9) == pytest.approx(math.pi / 2 * 3)

    def test_center_n4(self):
        e = pt.point_estimate(BitString("0011"))
        assert e.a_hat == pytest.approx(1.570796, abs=1e-6)
        assert e.a_star == 1.5
        assert e.p_hat == pytest.approx(math.sin(0.75) ** 2)
        assert e.p_hat == pytest.approx(0.464631, abs=1e-6)

    def test_extremes_n4(self):
        assert pt.point_estimate(BitString("0000")).p_hat == 0.0
        e = pt.point_estimate(BitString("1111"))
        assert e.a_star == 3.0
        assert e.p_hat == pytest.approx(math.sin(1.5) ** 2)

    def test_snap_ties_toward_zero(self):
        assert pt.snap_half_integer(0.25, 10) == 0.0
        assert pt.snap_half_integer(0.75, 10) == 0.5
        assert pt.snap_half_integer(0.76, 10) == 1.0
        assert pt.snap_half_integer(3.1, 3.05) == 3.0

    @given(st.integers(1, 2000), st.data())
    def test_snapped_on_grid(self, n, data):
        k = data.draw(st.integers(0, n))
        e = pt.estimate_from_count(n, k)
        assert (2 * e.a_star) == int(2 * e.a_star)
        assert abs(e.a_star - e.a_hat) <= 0.5 + 1e-12 or e.a_star == math.floor(2 * pt.a_max(n)) / 2
        assert 0 <= e.p_hat <= 1
        assert pt.theta(n, e.a_hat) == pytest.approx(k, abs=1e-6 * max(1, n))

    def test_grid_has_endpoints(self):
        g = pt.arcsine_grid(4)
        assert g[0] == 0 and g[-1] == 1
        assert np.all(np.diff(g) > 0)
