"""The arcsine partition of {0, ..., n}, its theta grid, and the snapped point estimator.

Anchors are ``k_s = (n/2)(1 - cos(s/sqrt(n)))`` for ``s = 0..floor(pi*sqrt(n))``.
Cell ``s`` holds the integers in ``[k_s, k_{s+1})``, where the last cell is
unbounded above. Intervals containing no integer are not cells.

The same anchors come from ``theta(a) = n sin^2(a/sqrt(n))`` at half-integer
``a = s/2``. The estimator snaps ``a_hat = sqrt(n) arcsin(sqrt(k/n))`` to that
half-integer grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .measures import BitString

# above this n, cells are derived from anchors on demand
LAZY_CELLS_ABOVE = 10**6


def num_anchors(n: int) -> int:
    return math.floor(math.pi * math.sqrt(n)) + 1


def anchors(n: int) -> np.ndarray:
    s = np.arange(num_anchors(n), dtype=np.float64)
    return (n / 2) * (1 - np.cos(s / math.sqrt(n)))


def theta(n: int, a):
    """Expected 1s-count at grid coordinate ``a``: n sin^2(a / sqrt(n))."""
    return n * np.sin(np.asarray(a, dtype=np.float64) / math.sqrt(n)) ** 2


def a_max(n: int) -> float:
    return (math.pi / 2) * math.sqrt(n)


@dataclass(frozen=True)
class Partition:
    n: int
    anchors: np.ndarray = field(repr=False)
    num_cells: int
    # materialized cells (None above LAZY_CELLS_ABOVE)
    cell_s: np.ndarray | None = field(default=None, repr=False)
    cell_lo: np.ndarray | None = field(default=None, repr=False)
    cell_hi: np.ndarray | None = field(default=None, repr=False)

    @property
    def lazy(self) -> bool:
        return self.cell_lo is None

    def anchor_index(self, k: int) -> int:
        """Index s of the interval [k_s, k_{s+1}) containing k."""
        return int(np.searchsorted(self.anchors, k, side="right")) - 1

    def cells(self) -> list[range]:
        if self.lazy:
            raise ValueError(f"cells not materialized for n={self.n}; use cell_of")
        return [range(lo, hi + 1) for lo, hi in zip(self.cell_lo.tolist(), self.cell_hi.tolist())]

    def cell_rows(self):
        """(s_index, lo, hi) triples for every nonempty cell."""
        if self.lazy:
            raise ValueError(f"cells not materialized for n={self.n}")
        return list(zip(self.cell_s.tolist(), self.cell_lo.tolist(), self.cell_hi.tolist()))


def build_partition(n: int) -> Partition:
    if n < 1:
        raise ValueError("partition needs n >= 1")
    a = anchors(n)
    if n > LAZY_CELLS_ABOVE:
        starts = np.minimum(np.ceil(a).astype(np.int64), n + 1)
        nonempty = np.count_nonzero(np.diff(starts) > 0) + int(starts[-1] <= n)
        return Partition(n, a, int(nonempty))
    s, lo, hi = kernels.cell_bounds(a, n)
    return Partition(n, a, len(lo), s, lo, hi)


def cell_of(partition: Partition, k: int) -> range:
    n = partition.n
    if not 0 <= k <= n:
        raise ValueError(f"count {k} outside 0..{n}")
    a = partition.anchors
    s = partition.anchor_index(k)
    lo = max(math.ceil(a[s]), 0)
    hi = n if s + 1 == len(a) else min(math.ceil(a[s + 1]) - 1, n)
    return range(lo, hi + 1)


def std_estimate(n: int, k) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    return np.sqrt(k * (n - k) / n)


def cell_width_ratio(n: int, k: int, partition: Partition | None = None) -> float:
    """|cell(k)| / sqrt(k(n-k)/n); undefined at k in {0, n}."""
    if not 1 <= k <= n - 1:
        raise ValueError("width ratio is defined only for 1 <= k <= n-1")
    part = partition if partition is not None else build_partition(n)
    return len(cell_of(part, k)) / float(std_estimate(n, k))


def width_ratios(partition: Partition) -> np.ndarray:
    """Width ratio for every interior k = 1..n-1 (vectorized)."""
    n = partition.n
    ks = np.arange(1, n, dtype=np.int64)
    idx = np.searchsorted(partition.cell_lo, ks, side="right") - 1
    widths = partition.cell_hi[idx] - partition.cell_lo[idx] + 1
    return widths / std_estimate(n, ks)


def a_hat(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError(f"count {k} outside 0..{n}")
    val = math.sqrt(n) * math.asin(math.sqrt(k / n))
    return min(max(val, 0.0), a_max(n))


def snap_half_integer(a: float, upper: float) -> float:
    """Nearest multiple of 1/2 to ``a`` that is <= ``upper``; ties go toward 0."""
    s = math.ceil(2 * a - 0.5)  # round(2a), exact halves rounded down
    s = max(s, 0)
    s_max = math.floor(2 * upper)
    return min(s, s_max) / 2


@dataclass(frozen=True)
class EstimatorResult:
    a_hat: float
    a_star: float
    p_hat: float


def estimate_from_count(n: int, k: int) -> EstimatorResult:
    if n < 1:
        raise ValueError("point estimate needs a nonempty sequence")
    ah = a_hat(n, k)
    a_star = snap_half_integer(ah, a_max(n))
    return EstimatorResult(ah, a_star, math.sin(a_star / math.sqrt(n)) ** 2)


def point_estimate(x: BitString) -> EstimatorResult:
    return estimate_from_count(x.n, x.k)


def arcsine_grid(n: int) -> np.ndarray:
    """Success probabilities k_s/n for every anchor, plus the endpoint 1."""
    s = np.arange(num_anchors(n), dtype=np.longdouble)
    p = np.sin(s / (2 * np.sqrt(np.longdouble(n)))) ** 2
    return np.unique(np.concatenate([p, np.array([1.0], dtype=np.longdouble)]))
