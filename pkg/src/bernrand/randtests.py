"""Randomness tests T(obj | P) with E_P 2^T <= 1, and weighted mixtures of them.

A test is a total function of the outcome and the measure. It returns an
integer, or ``+inf`` for outcomes of P-probability zero. That sentinel never
enters an expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ._exact import POS_INF, floor_log2
from .codes import ConfigurationError, CodeContext, ResourceError, get_provider
from .distributions import COUNT_DISTRIBUTIONS, Distribution, SEQUENCE_DISTRIBUTIONS, TwoPart
from .measures import CountClass, MeasureKind, MeasureSpec

SEQUENCE = "sequence-vs-Bernoulli"
COUNT = "count-vs-binomial"
COUNTCLASS = "sequence-vs-countclass"

EXHAUSTIVE_MAX_N = 14

NEG_INF = -math.inf


@dataclass(frozen=True)
class RandomnessTest:
    name: str
    target_kind: str
    evaluator: Callable
    kraft_certified: bool = True

    def __call__(self, obj, P):
        return self.evaluator(obj, P)


def lr_test(q: Distribution, obj, P) -> int | float:
    """floor(log2(q{obj} / P{obj})); +inf when P{obj} = 0, -inf when q{obj} = 0."""
    p_obj = P.prob(obj)
    if p_obj == 0:
        return POS_INF
    q_obj = q.prob(obj, P.n)
    if q_obj == 0:
        return NEG_INF
    return floor_log2(q_obj / p_obj)


def make_lr_test(name: str, q: Distribution, target_kind: str | None = None) -> RandomnessTest:
    kind = target_kind or (COUNT if q.target == "count" else SEQUENCE)
    certified = getattr(q, "kraft_certified", True)
    return RandomnessTest(name, kind, lambda obj, P: lr_test(q, obj, P), certified)


def _zero(obj, P):
    return POS_INF if P.prob(obj) == 0 else 0


def zero_test(target_kind: str = SEQUENCE, name: str = "zero") -> RandomnessTest:
    """T = 0 on the support of P: the trivially valid test."""
    return RandomnessTest(name, target_kind, _zero)


def class_test(name: str, provider_name: str) -> RandomnessTest:
    """Deficiency within the class of sequences sharing n and k.

    T(x | class) = floor(log2 C(n,k)) - L(x | n,k) against the uniform measure
    on that class.
    """
    provider = get_provider(provider_name)

    def evaluate(x, cls: CountClass):
        if cls.prob(x) == 0:
            return POS_INF
        return floor_log2(cls.size) - provider.length(x, CodeContext(cls.n, cls.k))

    return RandomnessTest(name, COUNTCLASS, evaluate, provider.kraft_certified)


@dataclass(frozen=True)
class TestWeighting:
    entries: tuple[tuple[RandomnessTest, Fraction], ...]

    def __post_init__(self):
        entries = tuple((t, Fraction(w)) for t, w in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ConfigurationError("empty weighting")
        if any(w <= 0 for _, w in entries):
            raise ConfigurationError("weights must be positive")
        if sum(w for _, w in entries) > 1:
            raise ConfigurationError("weights sum to more than 1")
        if len({t.target_kind for t, _ in entries}) != 1:
            raise ConfigurationError("mixed target kinds in one weighting")

    def penalty(self, test_name: str) -> int:
        """C_i = -floor(log2 w_i): how far D may fall below member i."""
        for t, w in self.entries:
            if t.name == test_name:
                return -floor_log2(w)
        raise KeyError(test_name)


def mixture_value(weighting: TestWeighting, obj, P) -> int | float:
    total = Fraction(0)
    for t, w in weighting.entries:
        v = t(obj, P)
        if v == POS_INF:
            return POS_INF
        if v == NEG_INF:
            continue
        total += w * (Fraction(2) ** v)
    if total == 0:
        return NEG_INF
    return floor_log2(total)


def mixture(weighting: TestWeighting, name: str = "mixture") -> RandomnessTest:
    """D = floor(log2 sum_i w_i 2^T_i); valid and D >= T_i - C_i for every member."""
    kind = weighting.entries[0][0].target_kind
    certified = all(t.kraft_certified for t, _ in weighting.entries)
    return RandomnessTest(name, kind, lambda obj, P: mixture_value(weighting, obj, P), certified)


def verify_expectation(test: RandomnessTest, P, n: int | None = None):
    """Exact E_P 2^T by summing over every outcome.

    Returns a Fraction, or ``math.inf`` if the test gives +inf to an outcome
    of positive probability.
    """
    n = P.n if n is None else n
    if n != P.n:
        raise ValueError("n does not match the measure")
    if n > EXHAUSTIVE_MAX_N:
        raise ResourceError(f"exhaustive expectation limited to n <= {EXHAUSTIVE_MAX_N}")
    total = Fraction(0)
    for obj in P.outcomes():
        p_obj = P.prob(obj)
        if p_obj == 0:
            continue
        t = test(obj, P)
        if t == POS_INF:
            return math.inf
        if t == NEG_INF:
            continue
        total += p_obj * Fraction(2) ** t
    return total


def measures_for(test: RandomnessTest, n: int, p_grid) -> list:
    """The measures a test is checked against: B or bin over p_grid, or every class."""
    if test.target_kind == SEQUENCE:
        return [MeasureSpec(MeasureKind.BERNOULLI, n, p) for p in p_grid]
    if test.target_kind == COUNT:
        return [MeasureSpec(MeasureKind.BINOMIAL, n, p) for p in p_grid]
    return [CountClass(n, k) for k in range(n + 1)]


# ---------------------------------------------------------------------------
# registry

_TESTS: dict[str, RandomnessTest] = {}

DEFAULT_WEIGHT = Fraction(1, 4)
ANCHOR_WEIGHT = Fraction(1, 2)


def _register(test: RandomnessTest) -> RandomnessTest:
    _TESTS[test.name] = test
    return test


def _build_registry() -> None:
    seq = SEQUENCE_DISTRIBUTIONS
    cnt = COUNT_DISTRIBUTIONS
    lr_kt = _register(make_lr_test("lr-kt", seq["kt"]))
    lr_unif = _register(make_lr_test("lr-uniform-count", seq["uniform-count"]))
    lr_cell = _register(make_lr_test("lr-cell", seq["cell"]))
    twopart_index = _register(make_lr_test("lr-twopart-index", TwoPart(cnt["cell"], "index")))
    _register(make_lr_test("lr-twopart-markov", TwoPart(cnt["cell"], "markov-index")))
    zero = _register(zero_test(SEQUENCE, "zero"))
    _register(mixture(TestWeighting(((lr_kt, DEFAULT_WEIGHT), (lr_unif, DEFAULT_WEIGHT), (lr_cell, DEFAULT_WEIGHT))), "mixture"))
    _register(mixture(TestWeighting(((zero, ANCHOR_WEIGHT), (twopart_index, 1 - ANCHOR_WEIGHT))), "anchored"))

    c_kt = _register(make_lr_test("lr-count-kt", cnt["kt"]))
    c_unif = _register(make_lr_test("lr-count-uniform", cnt["uniform"]))
    c_cell = _register(make_lr_test("lr-count-cell", cnt["cell"]))
    c_zero = _register(zero_test(COUNT, "zero-count"))
    _register(mixture(TestWeighting(((c_kt, DEFAULT_WEIGHT), (c_unif, DEFAULT_WEIGHT), (c_cell, DEFAULT_WEIGHT))), "mixture-count"))
    _register(mixture(TestWeighting(((c_zero, ANCHOR_WEIGHT), (c_cell, 1 - ANCHOR_WEIGHT))), "anchored-count"))

    _register(class_test("exch-index", "index"))
    _register(class_test("exch-markov-index", "markov-index"))
    _register(class_test("exch-kt", "kt"))
    _register(class_test("exch-zlib", "zlib"))


def default_weighting(kind: str = SEQUENCE) -> TestWeighting:
    names = ("lr-kt", "lr-uniform-count", "lr-cell") if kind == SEQUENCE else ("lr-count-kt", "lr-count-uniform", "lr-count-cell")
    return TestWeighting(tuple((_TESTS[n], DEFAULT_WEIGHT) for n in names))


def default_mixture(kind: str = SEQUENCE) -> RandomnessTest:
    return _TESTS["mixture" if kind == SEQUENCE else "mixture-count"]


def get_test(name: str) -> RandomnessTest:
    try:
        return _TESTS[name]
    except KeyError:
        raise ConfigurationError(f"unknown test {name!r}; known: {', '.join(sorted(_TESTS))}") from None


def registered_tests() -> dict[str, RandomnessTest]:
    return dict(_TESTS)


def register_test(test: RandomnessTest) -> None:
    _TESTS[test.name] = test


_build_registry()
