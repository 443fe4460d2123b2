import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bernrand import deficiency as df
from bernrand import kernels
from bernrand.codes import ConfigurationError, get_provider, index_length
from bernrand.distributions import COUNT_DISTRIBUTIONS, SEQUENCE_DISTRIBUTIONS, TwoPart, count_distribution
from bernrand.measures import BitString, MeasureSpec, log2_binom
from bernrand.partition import build_partition, cell_of
from bernrand.randtests import lr_test


def _exact(p):
    return p if isinstance(p, Fraction) else Fraction(*np.longdouble(p).as_integer_ratio())


class TestSingleMeasure:
    def test_typical_self(self):
        P = MeasureSpec.binomial(6, Fraction(1, 2))
        assert df.deficiency_vs(3, P, COUNT_DISTRIBUTIONS["kt"]) <= 1

    def test_point_mass(self):
                assert df.deficiency_vs(0, MeasureSpec.binomial(4, 0), "uniform") <= 0

    def test_unregistered(self):
        with pytest.raises(ConfigurationError):
            df.deficiency_vs(BitString("01"), MeasureSpec.bernoulli(2, Fraction(1, 2)), "nope")


class TestGridMinimum:
    @pytest.mark.parametrize("n", [1, 4, 12, 200])
    def test_all_zeros(self, n):
        x = BitString("0" * n)
        assert df.bernoulli_deficiency(x, "kt") in (-1, 0)

    def test_0011_equals_brute_min(self):
        x = BitString("0011")
        grid = df._grid_points(4, "arcsine", Fraction(1, 1000))
        assert len(grid) == 8  # seven half-integer points, plus p = 1
        q = SEQUENCE_DISTRIBUTIONS["kt"]
        brute = min(lr_test(q, x, MeasureSpec.bernoulli(4, _exact(p))) for p in grid)
        assert df.bernoulli_deficiency(x, "kt", anchor=0) == brute
        assert df.bernoulli_deficiency(x, "kt") == df.anchor_map(brute, Fraction(1, 2))

    def test_raw_all_zeros_goes_negative(self):
        # without the zero-test anchor, floor(log2 KT(0^n)) drifts below -1
        assert df.bernoulli_deficiency(BitString("0" * 12), "kt", anchor=0) < -1

    @pytest.mark.parametrize("n", [4, 8, 12])
    def test_balanced_near_half(self, n):
        # a KT-longest balanced sequence, against the p = 1/2 value
        x = BitString("01" * (n // 2))
        at_half = math.floor(math.log2(SEQUENCE_DISTRIBUTIONS["kt"].prob(x, n)) + n)
        assert abs(df.bernoulli_deficiency(x, "kt", grid=df.tenths_grid(), anchor=0) - at_half) <= 1

    def test_binomial_examples(self):
        assert df.binomial_deficiency_grid(0, 9, "cell") in (-1, 0)
        assert df.binomial_deficiency_grid(2, 4, "uniform", grid=[Fraction(1, 2)], anchor=0) == -1
        assert abs(df.binomial_deficiency_grid(50, 100, "cell")) <= 1


class TestExchangeability:
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=30).map(BitString))
    def test_index_saturates(self, x):
        d = df.exch_deficiency(x, "index")
        if x.k in (0, x.n):
            assert d == -1
        else:
            assert -1 < d <= 0

    def test_count_zero(self):
        assert df.exch_deficiency(BitString("000000"), "markov-index") == -get_provider("markov-index").length(
            BitString("000000"), df.CodeContext(6, 0)
        )

    def test_compressor(self):
        x = BitString("0" * 6 + "1" * 6)
        L = get_provider("zlib").length(x, df.CodeContext(12, 6))
        assert df.exch_deficiency(x, "zlib") == pytest.approx(log2_binom(12, 6) - L)
        assert log2_binom(12, 6) == pytest.approx(9.85, abs=0.01)


class TestPartitionReadings:
    def test_zero(self):
        cell, _ = df.binomial_deficiency_partition(0, 10)
        assert cell == -1

    def test_n4_center(self):
        cell, count = df.binomial_deficiency_partition(2, 4)
        assert cell == -1
        assert count == pytest.approx(math.log2(5) - 1)

    def test_n100_center(self):
        cell, _ = df.binomial_deficiency_partition(50, 100)
        width = len(cell_of(build_partition(100), 50))
        assert cell == pytest.approx(math.log2(width) - index_length(width))
        assert -1 < cell <= 0


class TestAudit:
    def test_0011_finite(self):
        rep = df.decomposition_audit(BitString("0011"))
        assert rep.finite()
        assert len(rep.FIELDS) == 9

    def test_all_zeros_n12(self):
        rep = df.decomposition_audit(BitString("0" * 12))
        assert rep.d_bern_grid in (-1, 0)
        assert rep.d_exch <= 0
        assert rep.d_bin_grid in (-1, 0)
        assert -2 <= rep.residual_thm1 <= 2

    def test_sandwich(self):
        lo, hi = df.corollary_sandwich(BitString("0011"), 0.5)
        assert math.isfinite(lo) and math.isfinite(hi)

    def test_sandwich_monotone(self):
        x = BitString("000000000111")
        rep = df.decomposition_audit(x)
        his = [df.corollary_sandwich(x, e)[1] for e in (0.1, 1, 10)]
        if rep.d_bin_grid >= 0:
            assert his == sorted(his)
        if rep.d_bin_grid == 0:
            lo, hi = df.corollary_sandwich(x, 1)
            assert lo == -hi

    def test_estimator(self):
        for n in (4, 10, 30):
            assert df.estimator_audit(BitString("0" * n)) <= 1
        assert isinstance(df.estimator_audit(BitString("0011")), int)

    def test_bad_config(self):
        with pytest.raises(ConfigurationError):
            df.Config(grid="nope")
        with pytest.raises(ConfigurationError):
            df.Config(precision_bits=32)
        with pytest.raises(ConfigurationError):
            df.Config(code="nope")


class TestDualRoute:
    """Engine (log-domain kernels) against exact rational evaluation, all x."""

    @pytest.mark.parametrize("n", [1, 3, 6, 8])
    @pytest.mark.parametrize("config", [df.Config(), df.Config(anchor=0, code="index", count_q="uniform")])
    def test_bernoulli_grid(self, n, config):
        eng = df.Engine(n, config)
        bits = kernels.enumerate_bits(n)
        f = eng.evaluate(bits)
        q = TwoPart(count_distribution(config.count_q), config.code)
        grid = [_exact(p) for p in eng.grid]
        for i, row in enumerate(bits):
            x = BitString(row.tolist())
            exact = min(df.anchor_map(lr_test(q, x, MeasureSpec.bernoulli(n, p)), config.anchor) for p in grid)
            assert f["d_bern_grid"][i] == exact

    @pytest.mark.parametrize("n", [2, 7, 11])
    def test_binomial_grid(self, n):
        eng = df.Engine(n)
        r = count_distribution(eng.config.count_q)
        grid = [_exact(p) for p in eng.grid]
        for k in range(n + 1):
            exact = min(df.anchor_map(lr_test(r, k, MeasureSpec.binomial(n, p)), eng.config.anchor) for p in grid)
            assert eng.d_bin_grid[k] == exact

    @pytest.mark.parametrize("n", [5, 9])
    def test_exchangeability(self, n):
        eng = df.Engine(n)
        bits = kernels.enumerate_bits(n)
        f = eng.evaluate(bits)
        for i in range(0, len(bits), 7):
            x = BitString(bits[i].tolist())
            assert f["d_exch"][i] == pytest.approx(df.exch_deficiency(x, eng.config.code))

    def test_precision_53(self):
        n = 8
        bits = kernels.enumerate_bits(n)
        a = df.Engine(n, df.Config(precision_bits=53)).evaluate(bits)
        b = df.Engine(n).evaluate(bits)
        assert np.abs(a["d_bern_grid"] - b["d_bern_grid"]).max() <= 1

    def test_reports_batch_matches_single(self):
        eng = df.Engine(6)
        xs = [BitString(r.tolist()) for r in kernels.enumerate_bits(6)[::5]]
        batch = eng.reports(xs)
        assert [r.d_bern_grid for r in batch] == [eng.report(x).d_bern_grid for x in xs]
