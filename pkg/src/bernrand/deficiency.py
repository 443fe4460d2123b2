"""Deficiency estimates for a sequence and the residuals of the decomposition.

The report compares three quantities. The Bernoulli deficiency of x is the
minimum over a p-grid. The exchangeability deficiency is log2 C(n,k) minus a
code length. The binomial deficiency of k is again a grid minimum. The
residuals measure how far ``d_bern = d_exch + d_bin`` and its relatives are
from holding.

By default a deficiency is the mixture test
``D = floor(log2(w0 + (1 - w0) * 2^T))``, where T is the likelihood-ratio test
against the two-part distribution ``q(x) = r(k) 2^-L(x|n,k)`` and w0 is the
zero-test weight (``anchor``). With ``anchor = 0``, D is T itself.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from ._exact import POS_INF, as_probability, floor_log2, log2_fraction, log2_int
from .codes import (
    CodeContext,
    CodeLengthProvider,
    ConfigurationError,
    get_provider,
    index_length,
    kt_length_count,
    markov_kt_length_counts,
)
from .distributions import (
    COUNT_DISTRIBUTIONS,
    SEQUENCE_DISTRIBUTIONS,
    CountDistribution,
    Distribution,
    TwoPart,
    count_distribution,
)
from .measures import BitString, MeasureSpec, log2_binom
from .partition import Partition, arcsine_grid, build_partition, cell_of, estimate_from_count
from .randtests import NEG_INF, lr_test

GRIDS = ("arcsine", "tenths", "fine", "arcsine+fine")
PRECISIONS = (53, 64)


@dataclass(frozen=True)
class Config:
    count_q: str = "cell"
    code: str = "markov-index"
    grid: str = "arcsine"
    anchor: Fraction = Fraction(1, 2)
    fine_step: Fraction = Fraction(1, 1000)
    precision_bits: int = 64

    def __post_init__(self):
        object.__setattr__(self, "anchor", as_probability(self.anchor))
        object.__setattr__(self, "fine_step", Fraction(self.fine_step))
        if self.anchor == 1:
            raise ConfigurationError("anchor weight must be < 1")
        if self.grid not in GRIDS:
            raise ConfigurationError(f"unknown grid {self.grid!r}; choose from {', '.join(GRIDS)}")
        if self.precision_bits not in PRECISIONS:
            raise ConfigurationError(f"precision_bits must be one of {PRECISIONS}")
        if not 0 < self.fine_step <= Fraction(1, 1000) or (1 / self.fine_step).denominator != 1:
            raise ConfigurationError("fine_step must be 1/m with m >= 1000")
        count_distribution(self.count_q)
        get_provider(self.code)

    def echo(self) -> dict:
        d = asdict(self)
        d["anchor"] = str(self.anchor)
        d["fine_step"] = str(self.fine_step)
        return d


DEFAULT_CONFIG = Config()


def anchor_map(t: int | float, anchor: Fraction) -> int | float:
    """floor(log2(w0 + (1 - w0) 2^t)): mixing the zero test into T."""
    if anchor == 0 or t == POS_INF:
        return t
    if t == NEG_INF:
        return floor_log2(anchor)
    return floor_log2(anchor + (1 - anchor) * Fraction(2) ** int(t))


def _anchor_array(t: np.ndarray, anchor: Fraction) -> np.ndarray:
    if anchor == 0:
        return t
    out = np.empty_like(t)
    for v in np.unique(t):
        iv = int(v)
        if iv == kernels.POS:
            mapped = kernels.POS
        elif iv == kernels.NEG:
            mapped = floor_log2(anchor)
        else:
            mapped = anchor_map(iv, anchor)
        out[t == v] = mapped
    return out


def _to_py(v: int) -> int | float:
    if v == kernels.POS:
        return POS_INF
    if v == kernels.NEG:
        return NEG_INF
    return int(v)


def _log2_grid(ps) -> tuple[np.ndarray, np.ndarray]:
    """log2 p and log2(1-p) in extended precision; exact rationals stay exact."""
    ps = list(ps)
    lp = np.empty(len(ps), dtype=np.longdouble)
    lp1 = np.empty(len(ps), dtype=np.longdouble)
    floats = [i for i, p in enumerate(ps) if not isinstance(p, Fraction)]
    for i, p in enumerate(ps):
        if isinstance(p, Fraction):
            lp[i] = log2_fraction(p)
            lp1[i] = log2_fraction(1 - p)
    if floats:
        v = np.array([ps[i] for i in floats], dtype=np.longdouble)
        with np.errstate(divide="ignore"):
            lp[floats] = np.log2(v)
            lp1[floats] = np.log2(np.longdouble(1) - v)
    return lp, lp1


def tenths_grid() -> list[Fraction]:
    return [Fraction(i, 10) for i in range(11)]


def fine_grid(step: Fraction = Fraction(1, 1000)) -> list[Fraction]:
    m = int(1 / step)
    return [Fraction(i, m) for i in range(m + 1)]


@lru_cache(maxsize=64)
def _grid_points(n: int, kind: str, step: Fraction) -> tuple:
    if kind == "tenths":
        return tuple(tenths_grid())
    if kind == "fine":
        return tuple(fine_grid(step))
    # arcsine_grid starts at 0 and ends at 1; keep the endpoints exact
    pts = [Fraction(0)] + list(arcsine_grid(n)[1:-1]) + [Fraction(1)]
    if kind == "arcsine+fine":
        pts = pts + fine_grid(step)[1:-1]
    return tuple(pts)


def _grid_value(p) -> float:
    return float(p)


@dataclass
class DeficiencyReport:
    x: BitString
    d_bern_grid: int | float
    d_bern_at_estimate: int | float
    d_exch: float
    d_bin_grid: int | float
    d_bin_partition_cell: float
    d_bin_partition_count: float
    residual_thm1: float
    residual_basis: float
    residual_estimator: int | float
    p_star: float = 0.0
    estimate: dict = field(default_factory=dict)

    FIELDS = (
        "d_bern_grid",
        "d_bern_at_estimate",
        "d_exch",
        "d_bin_grid",
        "d_bin_partition_cell",
        "d_bin_partition_count",
        "residual_thm1",
        "residual_basis",
        "residual_estimator",
    )

    def finite(self) -> bool:
        return all(math.isfinite(getattr(self, f)) for f in self.FIELDS)


class Engine:
    """Batch evaluator for all sequences of one length n under one Config."""

    def __init__(self, n: int, config: Config = DEFAULT_CONFIG):
        if n < 1:
            raise ValueError("sequences must be nonempty")
        self.n = n
        self.config = config
        self.count_q: CountDistribution = count_distribution(config.count_q)
        self.provider: CodeLengthProvider = get_provider(config.code)
        self.partition: Partition = build_partition(n)

        ks = range(n + 1)
        self.log2C = np.array([log2_int(math.comb(n, k)) for k in ks], dtype=np.longdouble)
        self.log2r = self._prec(self.count_q.log2_table(n))
        self.grid = _grid_points(n, config.grid, config.fine_step)
        self.log2p, self.log2p1 = (self._prec(a) for a in _log2_grid(self.grid))
        self._fine = None

        # count-level quantities depend on k only
        k_arr = np.arange(n + 1, dtype=np.int64)
        self.log2q_count = self.log2r - self.log2C
        t_bin, arg_bin = kernels.grid_min_floor(self.log2q_count, k_arr, n, self.log2p, self.log2p1)
        self.d_bin_grid = _anchor_array(t_bin, config.anchor)
        self.d_bin_arg = arg_bin

        est = [estimate_from_count(n, k) for k in ks]
        self.estimates = est
        sq = np.sqrt(np.longdouble(n))
        a_star = np.array([e.a_star for e in est], dtype=np.longdouble)
        with np.errstate(divide="ignore"):
            self.log2p_hat = self._prec(np.log2(np.sin(a_star / sq) ** 2))
            self.log2p1_hat = self._prec(np.log2(np.cos(a_star / sq) ** 2))

        cell_sizes = np.array([len(cell_of(self.partition, k)) for k in ks], dtype=np.int64)
        L_cell = np.array([index_length(int(s)) for s in cell_sizes], dtype=np.longdouble)
        self.d_bin_cell = np.log2(cell_sizes.astype(np.longdouble)) - L_cell
        self.d_bin_count = np.log2(np.longdouble(self.partition.num_cells)) - L_cell

    def _prec(self, a: np.ndarray) -> np.ndarray:
        if self.config.precision_bits == 53:
            return a.astype(np.float64).astype(np.longdouble)
        return a

    # -- code lengths -------------------------------------------------------

    def code_lengths(self, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(k, L(x | n, k)) for every row of a 0/1 matrix."""
        counts = kernels.transition_counts(bits)
        k = counts[:, 0]
        name = self.provider.name
        n = self.n
        if name == "index":
            table = np.array([index_length(math.comb(n, j)) for j in range(n + 1)], dtype=np.int64)
            return k, table[k]
        if name == "kt":
            table = np.array([kt_length_count(n, j) for j in range(n + 1)], dtype=np.int64)
            return k, table[k]
        if name == "markov-index":
            idx = np.array([index_length(math.comb(n, j)) for j in range(n + 1)], dtype=np.int64)
            L = np.empty(len(k), dtype=np.int64)
            cache: dict[tuple, int] = {}
            for i, row in enumerate(counts[:, 2:].tolist()):
                key = tuple(row)
                v = cache.get(key)
                if v is None:
                    v = cache[key] = markov_kt_length_counts(*key)
                L[i] = 1 + min(idx[k[i]], v)
            return k, L
        L = np.array(
            [self.provider.length(BitString(row), CodeContext(n, int(kk))) for row, kk in zip(bits.tolist(), k.tolist())],
            dtype=np.int64,
        )
        return k, L

    # -- batch evaluation ---------------------------------------------------

    def evaluate(self, bits: np.ndarray) -> dict[str, np.ndarray]:
        """All report fields for every row of ``bits`` (shape (m, n))."""
        bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
        if bits.shape[1] != self.n:
            raise ValueError(f"expected rows of length {self.n}")
        n, anchor = self.n, self.config.anchor
        k, L = self.code_lengths(bits)
        L_ld = L.astype(np.longdouble)
        log2q = self.log2r[k] - L_ld
        d_exch = self.log2C[k] - L_ld

        t_bern, arg = kernels.grid_min_floor(log2q, k, n, self.log2p, self.log2p1)
        d_bern = _anchor_array(t_bern, anchor)
        d_bin = self.d_bin_grid[k]

        t_est = kernels.pointwise_floor(log2q, k, n, self.log2p_hat[k], self.log2p1_hat[k])
        d_est = _anchor_array(t_est, anchor)

        safe_arg = np.where(arg < 0, 0, arg)
        t_bin_star = kernels.pointwise_floor(
            self.log2q_count[k], k, n, self.log2p[safe_arg], self.log2p1[safe_arg]
        )
        d_bin_star = _anchor_array(t_bin_star, anchor)

        return {
            "k": k,
            "L": L,
            "d_bern_grid": d_bern,
            "d_bern_arg": arg,
            "d_bern_at_estimate": d_est,
            "d_exch": d_exch.astype(np.float64),
            "d_bin_grid": d_bin,
            "d_bin_partition_cell": self.d_bin_cell[k].astype(np.float64),
            "d_bin_partition_count": self.d_bin_count[k].astype(np.float64),
            "residual_thm1": (d_bern.astype(np.longdouble) - d_exch - d_bin.astype(np.longdouble)).astype(np.float64),
            "residual_basis": (d_bern.astype(np.longdouble) - d_bin_star.astype(np.longdouble) - d_exch).astype(np.float64),
            "residual_estimator": d_est - d_bern,
        }

    def fine(self) -> tuple[np.ndarray, np.ndarray]:
        if self._fine is None:
            lp, lp1 = _log2_grid(fine_grid(self.config.fine_step))
            self._fine = (self._prec(lp), self._prec(lp1))
        return self._fine

    def estimator_gaps(self, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per row: D at the snapped estimate minus the fine-grid minimum.

        Returns the sequence-level gap and the count-level gap.
        """
        bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
        n, anchor = self.n, self.config.anchor
        k, L = self.code_lengths(bits)
        log2q = self.log2r[k] - L.astype(np.longdouble)
        lp, lp1 = self.fine()
        t_min, _ = kernels.grid_min_floor(log2q, k, n, lp, lp1)
        t_est = kernels.pointwise_floor(log2q, k, n, self.log2p_hat[k], self.log2p1_hat[k])
        seq_gap = _anchor_array(t_est, anchor) - _anchor_array(t_min, anchor)

        ks = np.arange(n + 1, dtype=np.int64)
        c_min, _ = kernels.grid_min_floor(self.log2q_count, ks, n, lp, lp1)
        c_est = kernels.pointwise_floor(self.log2q_count, ks, n, self.log2p_hat, self.log2p1_hat)
        count_gap = _anchor_array(c_est, anchor) - _anchor_array(c_min, anchor)
        return seq_gap, count_gap[k]

    def report(self, x: BitString) -> DeficiencyReport:
        return self.reports([x])[0]

    def reports(self, xs: list[BitString]) -> list[DeficiencyReport]:
        """Reports for many length-n sequences from one batched evaluation."""
        if any(x.n != self.n for x in xs):
            raise ValueError(f"all sequences must have length {self.n}")
        if not xs:
            return []
        f = self.evaluate(np.array([x.bits for x in xs], dtype=np.uint8))
        out = []
        for i, x in enumerate(xs):
            arg = int(f["d_bern_arg"][i])
            est = self.estimates[x.k]
            out.append(
                DeficiencyReport(
                    x=x,
                    d_bern_grid=_to_py(f["d_bern_grid"][i]),
                    d_bern_at_estimate=_to_py(f["d_bern_at_estimate"][i]),
                    d_exch=float(f["d_exch"][i]),
                    d_bin_grid=_to_py(f["d_bin_grid"][i]),
                    d_bin_partition_cell=float(f["d_bin_partition_cell"][i]),
                    d_bin_partition_count=float(f["d_bin_partition_count"][i]),
                    residual_thm1=float(f["residual_thm1"][i]),
                    residual_basis=float(f["residual_basis"][i]),
                    residual_estimator=_to_py(f["residual_estimator"][i]),
                    p_star=_grid_value(self.grid[arg]) if arg >= 0 else math.nan,
                    estimate={"a_hat": est.a_hat, "a_star": est.a_star, "p_hat": est.p_hat},
                )
            )
        return out


@lru_cache(maxsize=32)
def engine(n: int, config: Config = DEFAULT_CONFIG) -> Engine:
    return Engine(n, config)


# ---------------------------------------------------------------------------
# single-object operations


def _resolve_q(q, target: str) -> Distribution:
    if isinstance(q, Distribution):
        return q
    table = SEQUENCE_DISTRIBUTIONS if target == "sequence" else COUNT_DISTRIBUTIONS
    try:
        return table[q]
    except KeyError:
        raise ConfigurationError(f"unregistered {target} distribution {q!r}") from None


def deficiency_vs(obj, P: MeasureSpec, q) -> int | float:
    """floor(log2 q(obj) - log2 P(obj)), exactly; +inf if P(obj) = 0."""
    target = "count" if isinstance(obj, int) else "sequence"
    return lr_test(_resolve_q(q, target), obj, P)


def _grid_min(log2q_value, k: int, n: int, grid, anchor) -> int | float:
    lp, lp1 = _log2_grid(grid)
    t, _ = kernels.grid_min_floor(np.array([log2q_value], dtype=np.longdouble), np.array([k]), n, lp, lp1)
    return _to_py(_anchor_array(t, Fraction(anchor))[0])


def bernoulli_deficiency(x: BitString, q, grid=None, anchor=DEFAULT_CONFIG.anchor) -> int | float:
    """Minimum over ``grid`` (default: arcsine grid with endpoints) of D(x | B_{n,p}).

    ``anchor`` is the zero-test weight; 0 gives the raw likelihood-ratio test.
    """
    dist = _resolve_q(q, "sequence")
    grid = _grid_points(x.n, "arcsine", Fraction(1, 1000)) if grid is None else grid
    return _grid_min(log2_fraction(dist.prob(x, x.n)), x.k, x.n, grid, anchor)


def binomial_deficiency_grid(k: int, n: int, q, grid=None, anchor=DEFAULT_CONFIG.anchor) -> int | float:
    dist = _resolve_q(q, "count")
    grid = _grid_points(n, "arcsine", Fraction(1, 1000)) if grid is None else grid
    log2q = log2_fraction(dist.prob(k, n)) - log2_int(math.comb(n, k))
    return _grid_min(log2q, k, n, grid, anchor)


def exch_deficiency(x: BitString, L: CodeLengthProvider | str = "index", aux: int | None = None) -> float:
    """log2 C(n,k) - L(x | n, k[, aux])."""
    provider = get_provider(L) if isinstance(L, str) else L
    return log2_binom(x.n, x.k) - provider.length(x, CodeContext(x.n, x.k, aux=aux))


def binomial_deficiency_partition(k: int, n: int, L: CodeLengthProvider | str = "cell-index") -> tuple[float, float]:
    """(log2|cell(k)| - L(k|n,cell), log2(num_cells) - L(k|n,cell))."""
    provider = get_provider(L) if isinstance(L, str) else L
    part = build_partition(n)
    cell = cell_of(part, k)
    length = provider.length(k, CodeContext(n, cell=cell))
    return math.log2(len(cell)) - length, math.log2(part.num_cells) - length


def decomposition_audit(x: BitString, config: Config = DEFAULT_CONFIG) -> DeficiencyReport:
    return engine(x.n, config).report(x)


def corollary_sandwich(x: BitString, epsilon: float, config: Config = DEFAULT_CONFIG) -> tuple[float, float]:
    """(lower_slack, upper_slack); each should be >= -O(1) when d_bin >= 0."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    rep = decomposition_audit(x, config)
    d_exch = exch_deficiency(x, config.code)
    middle = rep.d_bern_grid - d_exch
    return middle - rep.d_bin_grid, (1 + epsilon) * rep.d_bin_grid - middle


def estimator_audit(x: BitString, config: Config = DEFAULT_CONFIG) -> int:
    seq_gap, _ = engine(x.n, config).estimator_gaps(np.array([x.bits], dtype=np.uint8))
    return int(seq_gap[0])


def estimator_audit_count(k: int, n: int, config: Config = DEFAULT_CONFIG) -> int:
    eng = engine(n, config)
    row = np.zeros((1, n), dtype=np.uint8)
    row[0, :k] = 1
    _, count_gap = eng.estimator_gaps(row)
    return int(count_gap[0])


def with_overrides(config: Config, **kw) -> Config:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
