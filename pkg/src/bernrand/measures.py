"""Bernoulli and binomial measures on finite binary sequences.

Two evaluation modes are offered. ``*_prob`` functions return exact
:class:`fractions.Fraction` values (floats are converted exactly), and are
what the verification oracle uses. ``*_log_prob`` functions return log2
values as Python floats; an impossible outcome has log-probability
``IMPOSSIBLE`` (``-inf``), which orders below every finite value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from ._exact import as_probability, log2_int

IMPOSSIBLE = -math.inf


class BitString:
    """Immutable finite binary sequence with cached length and 1s-count."""

    __slots__ = ("_bits", "_k")

    def __init__(self, bits: Iterable[int] | str):
        if isinstance(bits, str):
            if any(c not in "01" for c in bits):
                raise ValueError(f"not a 0/1 string: {bits!r}")
            data = tuple(int(c) for c in bits)
        else:
            data = tuple(int(b) for b in bits)
            if any(b not in (0, 1) for b in data):
                raise ValueError("bits must be 0 or 1")
        self._bits = data
        self._k = sum(data)

    @property
    def bits(self) -> tuple[int, ...]:
        return self._bits

    @property
    def n(self) -> int:
        return len(self._bits)

    @property
    def k(self) -> int:
        return self._k

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, i):
        return self._bits[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __str__(self) -> str:
        return "".join(map(str, self._bits))

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 40:
            s = s[:37] + "..."
        return f"BitString('{s}')"


def all_bitstrings(n: int) -> Iterator[BitString]:
    """Every element of {0,1}^n in lexicographic order."""
    for i in range(1 << n):
        yield BitString(format(i, f"0{n}b") if n else "")


class MeasureKind(str, Enum):
    BERNOULLI = "bernoulli"
    BINOMIAL = "binomial"


@dataclass(frozen=True)
class MeasureSpec:
    """B_{n,p} (on {0,1}^n) or bin_{n,p} (on {0..n})."""

    kind: MeasureKind
    n: int
    p: Fraction

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("measure needs n >= 1")
        object.__setattr__(self, "kind", MeasureKind(self.kind))
        object.__setattr__(self, "p", as_probability(self.p))

    @classmethod
    def bernoulli(cls, n: int, p) -> "MeasureSpec":
        return cls(MeasureKind.BERNOULLI, n, p)

    @classmethod
    def binomial(cls, n: int, p) -> "MeasureSpec":
        return cls(MeasureKind.BINOMIAL, n, p)

    def prob(self, obj) -> Fraction:
        if self.kind is MeasureKind.BERNOULLI:
            return bernoulli_prob(self.n, self.p, obj)
        return binomial_prob(self.n, self.p, obj)

    def log_prob(self, obj) -> float:
        if self.kind is MeasureKind.BERNOULLI:
            return bernoulli_log_prob(self.n, self.p, obj)
        return binomial_log_prob(self.n, self.p, obj)

    def outcomes(self) -> Iterator:
        if self.kind is MeasureKind.BERNOULLI:
            return all_bitstrings(self.n)
        return iter(range(self.n + 1))


@dataclass(frozen=True)
class CountClass:
    """The set of length-n sequences with exactly k ones, as a uniform measure."""

    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")

    @property
    def size(self) -> int:
        return math.comb(self.n, self.k)

    @property
    def log2_size(self) -> float:
        return log2_binom(self.n, self.k)

    def prob(self, x: BitString) -> Fraction:
        if x.n != self.n:
            raise ValueError("length mismatch")
        return Fraction(1, self.size) if x.k == self.k else Fraction(0)

    def outcomes(self) -> Iterator[BitString]:
        return (x for x in all_bitstrings(self.n) if x.k == self.k)


def _check_sequence(n: int, x: BitString) -> None:
    if not isinstance(x, BitString):
        raise TypeError("x must be a BitString")
    if x.n != n:
        raise ValueError(f"sequence has length {x.n}, measure has n={n}")


@lru_cache(maxsize=1 << 16)
def _power_term(n: int, p: Fraction, k: int) -> Fraction:
    return p**k * (1 - p) ** (n - k)


def bernoulli_prob(n: int, p, x: BitString) -> Fraction:
    """Exact B_{n,p}{x} = p^k (1-p)^(n-k)."""
    _check_sequence(n, x)
    return _power_term(n, as_probability(p), x.k)


def binomial_prob(n: int, p, k: int) -> Fraction:
    """Exact bin_{n,p}{k} = C(n,k) p^k (1-p)^(n-k)."""
    if not 0 <= k <= n:
        raise ValueError(f"count {k} outside 0..{n}")
    return math.comb(n, k) * _power_term(n, as_probability(p), k)


def _log2_power_term(n: int, p, k: int) -> float:
    p = as_probability(p)
    out = 0.0
    if k:
        if p == 0:
            return IMPOSSIBLE
        out += k * float(log2_int(p.numerator) - log2_int(p.denominator))
    if n - k:
        if p == 1:
            return IMPOSSIBLE
        q = 1 - p
        out += (n - k) * float(log2_int(q.numerator) - log2_int(q.denominator))
    return out


def bernoulli_log_prob(n: int, p, x: BitString) -> float:
    """log2 B_{n,p}{x}; ``IMPOSSIBLE`` when p in {0,1} rules x out."""
    _check_sequence(n, x)
    return _log2_power_term(n, p, x.k)


def binomial_log_prob(n: int, p, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError(f"count {k} outside 0..{n}")
    term = _log2_power_term(n, p, k)
    if term == IMPOSSIBLE:
        return IMPOSSIBLE
    return log2_binom(n, k) + term


@lru_cache(maxsize=65536)
def log2_binom(n: int, k: int) -> float:
    """log2 C(n, k) from the exact integer coefficient."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return float(log2_int(math.comb(n, k)))
