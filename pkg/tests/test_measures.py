import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bernrand.measures import (
    IMPOSSIBLE,
    BitString,
    CountClass,
    MeasureSpec,
    all_bitstrings,
    bernoulli_log_prob,
    bernoulli_prob,
    binomial_log_prob,
    binomial_prob,
    log2_binom,
)

TENTHS = [Fraction(i, 10) for i in range(11)]
probs = st.fractions(min_value=0, max_value=1, max_denominator=50)


class TestBitString:
    def test_counts(self):
        x = BitString("0110")
        assert (x.n, x.k, str(x)) == (4, 2, "0110")

    def test_rejects_other_symbols(self):
        with pytest.raises(ValueError):
            BitString("01a")
        with pytest.raises(ValueError):
            BitString([0, 2])

    def test_equality_and_hash(self):
        assert BitString("01") == BitString([0, 1])
        assert len({BitString("01"), BitString([0, 1])}) == 1

    def test_enumeration_order(self):
        assert [str(x) for x in all_bitstrings(2)] == ["00", "01", "10", "11"]


class TestExamples:
    # expected values: math.log2 of the hand-computed probability
    def test_bernoulli_quarter(self):
        assert bernoulli_log_prob(4, Fraction(1, 4), BitString("1000")) == pytest.approx(math.log2(27 / 256), abs=1e-12)
        assert bernoulli_log_prob(4, 0.25, BitString("1000")) == pytest.approx(-3.245112, abs=1e-6)

    def test_degenerate(self):
        assert bernoulli_log_prob(3, 0, BitString("000")) == 0.0
        assert bernoulli_log_prob(3, 0, BitString("001")) == IMPOSSIBLE

    @pytest.mark.parametrize(
        "n,p,k,expected",
        [(4, Fraction(1, 2), 2, -1.415037), (5, 1, 5, 0.0), (1, 0.3, 1, -1.736966)],
    )
    def test_binomial(self, n, p, k, expected):
        assert binomial_log_prob(n, p, k) == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("n,k,expected", [(4, 2, 2.584963), (7, 0, 0.0), (10, 5, 7.977280)])
    def test_log2_binom(self, n, k, expected):
        assert log2_binom(n, k) == pytest.approx(expected, abs=1e-6)

    def test_errors(self):
        with pytest.raises(ValueError):
            binomial_prob(3, Fraction(1, 2), 4)
        with pytest.raises(ValueError):
            bernoulli_prob(3, Fraction(1, 2), BitString("01"))
        with pytest.raises(ValueError):
            MeasureSpec.bernoulli(3, Fraction(3, 2))


class TestExactness:
    @pytest.mark.parametrize("p", TENTHS)
    def test_sums_to_one_n8(self, p):
        B, b = MeasureSpec.bernoulli(8, p), MeasureSpec.binomial(8, p)
        assert sum(B.prob(x) for x in B.outcomes()) == 1
        assert sum(b.prob(k) for k in b.outcomes()) == 1

    @given(n=st.integers(1, 40), p=probs)
    def test_binomial_sums_to_one(self, n, p):
        assert sum(binomial_prob(n, p, k) for k in range(n + 1)) == 1

    @given(n=st.integers(1, 60), k=st.integers(0, 60))
    def test_log2_binom_symmetric(self, n, k):
        k = k % (n + 1)
        assert log2_binom(n, k) == log2_binom(n, n - k)

    @given(n=st.integers(1, 30), k=st.integers(0, 30), p=probs)
    def test_log_matches_exact(self, n, k, p):
        k = k % (n + 1)
        exact = binomial_prob(n, p, k)
        lp = binomial_log_prob(n, p, k)
        if exact == 0:
            assert lp == IMPOSSIBLE
        else:
            assert lp == pytest.approx(math.log2(exact.numerator) - math.log2(exact.denominator), abs=1e-9)

    def test_float_converted_exactly(self):
        assert MeasureSpec.bernoulli(2, 0.1).p == Fraction(0.1)


class TestCountClass:
    def test_uniform(self):
        c = CountClass(4, 2)
        assert c.size == 6
        assert c.prob(BitString("0101")) == Fraction(1, 6)
        assert c.prob(BitString("0001")) == 0
        assert sum(1 for _ in c.outcomes()) == 6

    def test_bad_k(self):
        with pytest.raises(ValueError):
            CountClass(3, 4)
