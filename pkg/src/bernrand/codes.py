"""Conditional code-length providers L(obj | ctx), in whole bits.

Every certified provider satisfies the Kraft inequality over its domain for
each fixed context. Its lengths therefore upper-bound prefix complexity up to
an additive constant. Compressor backends are only heuristic bounds and are
flagged ``kraft_certified = False``.
"""

from __future__ import annotations

import bz2
import lzma
import math
import shlex
import subprocess
import zlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from ._exact import ceil_log2, double_factorial_odd
from .measures import BitString, all_bitstrings

KRAFT_DOMAIN_LIMIT = 1 << 20
COMPRESSOR_HEADER_BITS = 8


class ConfigurationError(ValueError):
    """Unknown provider/backend, or a distribution that fails its checks."""


class ResourceError(RuntimeError):
    """Requested enumeration exceeds the exhaustive limits."""


@dataclass(frozen=True)
class CodeContext:
    """Conditioning data ``y`` in L(obj | y).

    The kind is implied by which fields are set: (n), (n,k), (n,p),
    (n,cell) or (n,k,aux).
    """

    n: int
    k: int | None = None
    p: Fraction | None = None
    cell: range | None = None
    aux: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("context n must be >= 0")
        if self.k is not None and not 0 <= self.k <= self.n:
            raise ValueError("context k outside 0..n")
        if self.cell is not None:
            c = self.cell
            if c.step != 1 or len(c) == 0 or c.start < 0 or c.stop - 1 > self.n:
                raise ValueError("cell must be a nonempty contiguous range inside 0..n")

    @property
    def kind(self) -> str:
        if self.cell is not None:
            return "n,cell"
        if self.k is not None:
            return "n,k,aux" if self.aux is not None else "n,k"
        if self.p is not None:
            return "n,p"
        return "n"


# ---------------------------------------------------------------------------
# primitive length functions


def length_fixed_index(obj, domain, ctx: CodeContext | None = None) -> int:
    """Fixed-length index into a finite domain; singletons still cost 1 bit."""
    size = len(domain)
    if size == 0:
        raise ValueError("empty domain")
    if obj not in domain:
        raise ValueError(f"{obj!r} is not in the domain")
    return index_length(size)


def index_length(size: int) -> int:
    return max(1, (size - 1).bit_length())


@lru_cache(maxsize=None)
def kt_probability_count(n: int, k: int) -> Fraction:
    """KT probability of any length-n sequence with k ones (it is exchangeable)."""
    return Fraction(
        double_factorial_odd(k) * double_factorial_odd(n - k),
        (1 << n) * math.factorial(n),
    )


def kt_probability(x: BitString) -> Fraction:
    """Sequential KT probability with successor rule (ones + 1/2)/(t + 1)."""
    return kt_probability_count(x.n, x.k)


def kt_probability_sequential(x: BitString) -> Fraction:
    # direct product; kept as an independent route for tests
    prob = Fraction(1)
    ones = 0
    for t, b in enumerate(x):
        p1 = Fraction(2 * ones + 1, 2 * (t + 1))
        prob *= p1 if b else 1 - p1
        ones += b
    return prob


def length_kt(x: BitString, ctx: CodeContext | None = None) -> int:
    if x.n < 1:
        raise ValueError("KT code needs n >= 1")
    return kt_length_count(x.n, x.k)


@lru_cache(maxsize=None)
def kt_length_count(n: int, k: int) -> int:
    return ceil_log2(1 / kt_probability_count(n, k))


@lru_cache(maxsize=None)
def markov_kt_probability_counts(n00: int, n01: int, n10: int, n11: int) -> Fraction:
    """Order-1 KT: first bit costs 1/2, then one KT estimator per previous bit."""
    return Fraction(1, 2) * kt_probability_count(n00 + n01, n01) * kt_probability_count(n10 + n11, n11)


def transitions(x: BitString) -> tuple[int, int, int, int]:
    c = [0, 0, 0, 0]
    for a, b in zip(x.bits, x.bits[1:]):
        c[2 * a + b] += 1
    return tuple(c)


def markov_kt_probability(x: BitString) -> Fraction:
    if x.n == 0:
        return Fraction(1)
    return markov_kt_probability_counts(*transitions(x))


@lru_cache(maxsize=None)
def markov_kt_length_counts(n00: int, n01: int, n10: int, n11: int) -> int:
    return ceil_log2(1 / markov_kt_probability_counts(n00, n01, n10, n11))


# -- universal integer codes -------------------------------------------------

# length_integer(m) <= 2*floor(log2 m) + INTEGER_CODE_CONSTANT for all m >= 1
INTEGER_CODE_CONSTANT = 2


def elias_gamma_encode(m: int) -> str:
    if m < 1:
        raise ValueError("Elias codes need m >= 1")
    b = bin(m)[2:]
    return "0" * (len(b) - 1) + b


def elias_gamma_decode(bits: str, pos: int = 0) -> tuple[int, int]:
    zeros = 0
    while bits[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    return int(bits[pos + zeros:end], 2), end


def elias_delta_encode(m: int) -> str:
    if m < 1:
        raise ValueError("Elias codes need m >= 1")
    b = bin(m)[2:]
    return elias_gamma_encode(len(b)) + b[1:]


def elias_delta_decode(bits: str, pos: int = 0) -> tuple[int, int]:
    nbits, pos = elias_gamma_decode(bits, pos)
    end = pos + nbits - 1
    return int("1" + bits[pos:end], 2), end


def length_integer(m: int) -> int:
    """Elias-delta length: floor(log2 m) + 2 floor(log2(floor(log2 m) + 1)) + 1."""
    if m < 1:
        raise ValueError("integer code needs m >= 1")
    L = m.bit_length() - 1
    return L + 2 * ((L + 1).bit_length() - 1) + 1


def zigzag(v: int) -> int:
    """Map a signed integer to 1, 2, 3, ... (0 -> 1, -1 -> 2, 1 -> 3, ...)."""
    return 2 * v + 1 if v >= 0 else -2 * v


# -- compressor backends -----------------------------------------------------


def pack_bits(x: BitString) -> bytes:
    """MSB-first packing, zero-padded to a whole byte."""
    s = str(x)
    s += "0" * (-len(s) % 8)
    return int(s, 2).to_bytes(len(s) // 8, "big") if s else b""


_BUILTIN_CODECS: dict[str, Callable[[bytes], bytes]] = {
    "zlib": lambda b: zlib.compress(b, 9),
    "bz2": lambda b: bz2.compress(b, 9),
    "lzma": lambda b: lzma.compress(b, preset=9),
}

_backends: dict[str, Callable[[bytes], bytes]] = dict(_BUILTIN_CODECS)


def _external(command: str) -> Callable[[bytes], bytes]:
    argv = shlex.split(command)

    def run(data: bytes) -> bytes:
        proc = subprocess.run(argv, input=data, capture_output=True, check=True)
        return proc.stdout

    return run


def register_backend(name: str, spec: str) -> None:
    """Register ``name`` as a built-in codec (``zlib``...) or ``cmd:<command line>``."""
    if spec.startswith("cmd:"):
        _backends[name] = _external(spec[4:].strip())
    elif spec in _BUILTIN_CODECS:
        _backends[name] = _BUILTIN_CODECS[spec]
    else:
        raise ConfigurationError(f"unknown codec {spec!r} for backend {name!r}")
    _PROVIDERS[name] = CompressorProvider(name)


def backends() -> list[str]:
    return sorted(_backends)


def length_compressor(x: BitString, ctx: CodeContext | None, backend: str) -> int:
    try:
        codec = _backends[backend]
    except KeyError:
        raise ConfigurationError(f"unknown compressor backend {backend!r}") from None
    if x.n == 0:
        return COMPRESSOR_HEADER_BITS
    return COMPRESSOR_HEADER_BITS + 8 * len(codec(pack_bits(x)))


# ---------------------------------------------------------------------------
# providers


class CodeLengthProvider:
    name: str = ""
    domain_kind: str = "bitstring"
    kraft_certified: bool = True

    def length(self, obj, ctx: CodeContext) -> int:
        raise NotImplementedError

    def domain(self, ctx: CodeContext) -> Iterable:
        """Objects coded under ``ctx``; the Kraft sum ranges over these."""
        if self.domain_kind == "integer":
            if ctx.cell is not None:
                return ctx.cell
            return range(ctx.n + 1)
        if ctx.k is not None:
            return (x for x in all_bitstrings(ctx.n) if x.k == ctx.k)
        return all_bitstrings(ctx.n)

    def domain_size(self, ctx: CodeContext) -> int:
        if self.domain_kind == "integer":
            return len(ctx.cell) if ctx.cell is not None else ctx.n + 1
        if ctx.k is not None:
            return math.comb(ctx.n, ctx.k)
        return 1 << ctx.n

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class IndexProvider(CodeLengthProvider):
    """Fixed-length index into the context's domain."""

    name = "index"

    def length(self, obj, ctx):
        return index_length(self.domain_size(ctx))


class CellIndexProvider(IndexProvider):
    name = "cell-index"
    domain_kind = "integer"

    def length(self, obj, ctx):
        if obj not in self.domain(ctx):
            raise ValueError(f"{obj} not in {ctx.cell}")
        return index_length(self.domain_size(ctx))


class KTProvider(CodeLengthProvider):
    name = "kt"

    def length(self, x, ctx):
        return length_kt(x, ctx)


class MarkovIndexProvider(CodeLengthProvider):
    """One flag bit, then the shorter of the fixed index and the order-1 KT code.

    Kraft: half the mass goes to each branch and each branch sums to at most 1.
    """

    name = "markov-index"

    def length(self, x, ctx):
        idx = index_length(self.domain_size(ctx))
        # the order-1 KT branch always costs >= 1 bit (first symbol 1/2)
        if x.n == 0 or idx <= 1:
            return 1 + idx
        return 1 + min(idx, markov_kt_length_counts(*transitions(x)))


class EliasDeltaProvider(CodeLengthProvider):
    """Codes a count k >= 0 as delta(k + 1); context is ignored."""

    name = "elias-delta"
    domain_kind = "integer"

    def length(self, k, ctx):
        return length_integer(k + 1)


class CompressorProvider(CodeLengthProvider):
    kraft_certified = False

    def __init__(self, backend: str):
        self.name = backend

    def length(self, x, ctx):
        return length_compressor(x, ctx, self.name)


_PROVIDERS: dict[str, CodeLengthProvider] = {
    p.name: p
    for p in (IndexProvider(), CellIndexProvider(), KTProvider(), MarkovIndexProvider(), EliasDeltaProvider())
}
for _name in _BUILTIN_CODECS:
    _PROVIDERS[_name] = CompressorProvider(_name)


def get_provider(name: str) -> CodeLengthProvider:
    try:
        return _PROVIDERS[name]
    except KeyError:
        raise ConfigurationError(f"unknown code provider {name!r}; known: {', '.join(sorted(_PROVIDERS))}") from None


def providers() -> dict[str, CodeLengthProvider]:
    return dict(_PROVIDERS)


def kraft_sum(provider: CodeLengthProvider, ctx: CodeContext, domain: Iterable | None = None) -> Fraction:
    """Exact sum of 2^-L(obj|ctx) over the domain."""
    if domain is None:
        if provider.domain_size(ctx) > KRAFT_DOMAIN_LIMIT:
            raise ResourceError(f"domain of {provider.name} under {ctx.kind} is too large to enumerate")
        domain = provider.domain(ctx)
    else:
        domain = list(domain)
        if len(domain) > KRAFT_DOMAIN_LIMIT:
            raise ResourceError("domain too large to enumerate")
    total = Fraction(0)
    for obj in domain:
        total += Fraction(1, 1 << provider.length(obj, ctx))
    return total
