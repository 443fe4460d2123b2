"""Fixed comparison distributions q used by likelihood-ratio tests.

Count-level distributions live on {0..n}; sequence-level ones on {0,1}^n.
All probabilities are exact rationals. A distribution may be
sub-normalized (total mass <= 1), which keeps every test built from it valid.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._exact import log2_fraction
from .codes import ConfigurationError, CodeContext, get_provider, kt_probability_count
from .measures import BitString, all_bitstrings
from .partition import build_partition, cell_of

NORMALIZATION_CHECK_MAX_N = 14


class Distribution:
    name = ""
    target = "sequence"  # or "count"

    def prob(self, obj, n: int) -> Fraction:
        raise NotImplementedError

    def total_mass(self, n: int) -> Fraction:
        if self.target == "count":
            return sum((self.prob(k, n) for k in range(n + 1)), Fraction(0))
        if n > NORMALIZATION_CHECK_MAX_N:
            raise ValueError(f"exhaustive mass check limited to n <= {NORMALIZATION_CHECK_MAX_N}")
        return sum((self.prob(x, n) for x in all_bitstrings(n)), Fraction(0))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class CountDistribution(Distribution):
    target = "count"

    def log2_table(self, n: int) -> np.ndarray:
        """log2 r(k) for k = 0..n in extended precision."""
        return _log2_table(self, n)


@lru_cache(maxsize=256)
def _log2_table(dist: CountDistribution, n: int) -> np.ndarray:
    return np.array([log2_fraction(dist.prob(k, n)) for k in range(n + 1)], dtype=np.longdouble)


class UniformCount(CountDistribution):
    name = "uniform"

    def prob(self, k, n):
        return Fraction(1, n + 1)


class CellCount(CountDistribution):
    """r(k) = 1 / (num_cells * |cell(k)|): pick a cell uniformly, then k within it."""

    name = "cell"

    def prob(self, k, n):
        return _cell_prob(n, k)


@lru_cache(maxsize=1 << 16)
def _cell_prob(n, k):
    part = _partition(n)
    return Fraction(1, part.num_cells * len(cell_of(part, k)))


@lru_cache(maxsize=64)
def _partition(n):
    return build_partition(n)


class KTCount(CountDistribution):
    """Count marginal of the KT sequence distribution."""

    name = "kt"

    def prob(self, k, n):
        return math.comb(n, k) * kt_probability_count(n, k)


class CountMixture(CountDistribution):
    def __init__(self, name: str, entries):
        self.name = name
        self.entries = tuple((d, Fraction(w)) for d, w in entries)

    def prob(self, k, n):
        return sum((w * d.prob(k, n) for d, w in self.entries), Fraction(0))


class KTSequence(Distribution):
    name = "kt"

    def prob(self, x, n):
        return kt_probability_count(n, x.k)


class TwoPart(Distribution):
    """q(x) = r(k) * w(x | n, k): a count, then a position within its class.

    ``within`` is ``"uniform"`` (w = 1/C(n,k), the exact factorized form) or
    the name of a code provider (w = 2^-L(x|n,k)).
    """

    def __init__(self, count: CountDistribution, within: str = "uniform", name: str | None = None):
        self.count = count
        self.within = within
        self.provider = None if within == "uniform" else get_provider(within)
        self.name = name or f"twopart({count.name},{within})"

    @property
    def kraft_certified(self) -> bool:
        return self.provider is None or self.provider.kraft_certified

    def within_prob(self, x: BitString, n: int) -> Fraction:
        if self.provider is None:
            return Fraction(1, math.comb(n, x.k))
        return Fraction(1, 1 << self.provider.length(x, CodeContext(n, x.k)))

    def prob(self, x, n):
        return self.count.prob(x.k, n) * self.within_prob(x, n)


class SequenceMixture(Distribution):
    def __init__(self, name: str, entries):
        self.name = name
        self.entries = tuple((d, Fraction(w)) for d, w in entries)

    def prob(self, x, n):
        return sum((w * d.prob(x, n) for d, w in self.entries), Fraction(0))


COUNT_DISTRIBUTIONS: dict[str, CountDistribution] = {
    d.name: d for d in (UniformCount(), CellCount(), KTCount())
}
COUNT_DISTRIBUTIONS["mix"] = CountMixture(
    "mix", [(COUNT_DISTRIBUTIONS[k], Fraction(1, 3)) for k in ("kt", "uniform", "cell")]
)

SEQUENCE_DISTRIBUTIONS: dict[str, Distribution] = {
    "kt": KTSequence(),
    "uniform-count": TwoPart(COUNT_DISTRIBUTIONS["uniform"], name="uniform-count"),
    "cell": TwoPart(COUNT_DISTRIBUTIONS["cell"], name="cell"),
}


def count_distribution(name: str) -> CountDistribution:
    try:
        return COUNT_DISTRIBUTIONS[name]
    except KeyError:
        raise ConfigurationError(f"unknown count distribution {name!r}") from None


def sequence_distribution(name: str) -> Distribution:
    try:
        return SEQUENCE_DISTRIBUTIONS[name]
    except KeyError:
        raise ConfigurationError(f"unknown sequence distribution {name!r}") from None


def induced_count(q: Distribution) -> CountDistribution:
    """The count marginal r(k) = sum of q over the class with k ones.

    Closed form for the built-in sequence distributions. For a two-part q
    with a code provider, this returns the declared count factor, which
    upper-bounds the true marginal by Kraft.
    """
    if isinstance(q, TwoPart):
        return q.count
    if isinstance(q, KTSequence):
        return COUNT_DISTRIBUTIONS["kt"]
    if isinstance(q, SequenceMixture):
        return CountMixture(f"marginal({q.name})", [(induced_count(d), w) for d, w in q.entries])
    raise ConfigurationError(f"no count marginal known for {q!r}")


def check_normalized(q: Distribution, max_n: int = 10) -> None:
    """Raise ConfigurationError if q has mass > 1 for some n in 1..max_n."""
    for n in range(1, min(max_n, NORMALIZATION_CHECK_MAX_N) + 1):
        mass = q.total_mass(n)
        if mass > 1:
            raise ConfigurationError(f"{q.name} has total mass {mass} > 1 at n={n}")


def register_sequence_distribution(q: Distribution, check_up_to: int = 10) -> None:
    check_normalized(q, check_up_to)
    SEQUENCE_DISTRIBUTIONS[q.name] = q


def register_count_distribution(r: CountDistribution, check_up_to: int = 10) -> None:
    check_normalized(r, check_up_to)
    COUNT_DISTRIBUTIONS[r.name] = r
