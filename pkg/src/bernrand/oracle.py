"""Brute-force verification: exhaustive sweeps that certify the exact contracts.

Exhaustive checks enumerate every outcome and use exact rational arithmetic;
no floating-point comparison decides a PASS or FAIL. Sampled sweeps only
report statistics; their ledger lines are SKIP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from .codes import CodeContext, ResourceError, get_provider, kraft_sum, providers
from .deficiency import (
    DEFAULT_CONFIG,
    Config,
    Engine,
    _grid_points,
    bernoulli_deficiency,
    binomial_deficiency_grid,
    tenths_grid,
)
from .distributions import TwoPart, count_distribution
from .measures import BitString, MeasureSpec, all_bitstrings
from .partition import anchors, build_partition, std_estimate, theta, width_ratios
from .randtests import (
    COUNTCLASS,
    EXHAUSTIVE_MAX_N,
    lr_test,
    measures_for,
    registered_tests,
    get_test,
    verify_expectation,
)

RESIDUAL_EXHAUSTIVE_MAX_N = 12
SAMPLED_MAX_N = 10**4


@dataclass(frozen=True)
class SweepSpec:
    n_range: tuple[int, ...]
    p_grid: tuple[Fraction, ...] = tuple(tenths_grid())
    providers: tuple[str, ...] | None = None
    tests: tuple[str, ...] | None = None
    mode: str = "exhaustive"
    sample_count: int = 0
    seed: int | None = None
    sample_p: Fraction = Fraction(1, 2)
    config: Config = DEFAULT_CONFIG

    def __post_init__(self):
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.n_range:
            raise ValueError("empty n range")
        if min(self.n_range) < 1:
            raise ValueError("n must be >= 1")
        if self.mode == "exhaustive" and max(self.n_range) > EXHAUSTIVE_MAX_N:
            raise ResourceError(f"exhaustive mode requires n <= {EXHAUSTIVE_MAX_N}")
        if self.mode == "sampled":
            if self.seed is None:
                raise ValueError("sampled mode requires a seed")
            if self.sample_count < 1:
                raise ValueError("sampled mode requires a positive sample count")
            if max(self.n_range) > SAMPLED_MAX_N:
                raise ResourceError(f"sampled mode requires n <= {SAMPLED_MAX_N}")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return "inf" if v == math.inf else repr(v)
    return str(v)


@dataclass(frozen=True)
class Check:
    name: str
    n: int
    p: Fraction | None
    value: object
    bound: object
    status: str
    note: str = ""

    def line(self) -> str:
        text = (
            f"CHECK {self.name} n={self.n} p={_fmt(self.p)} "
            f"value={_fmt(self.value)} bound={_fmt(self.bound)} {self.status}"
        )
        return f"{text} # {self.note}" if self.note else text


@dataclass
class Ledger:
    checks: list[Check] = field(default_factory=list)
    header: list[str] = field(default_factory=list)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.status == "FAIL"]

    @property
    def ok(self) -> bool:
        return not self.failed

    def render(self) -> str:
        lines = [f"# {h}" for h in self.header] + [c.line() for c in self.checks]
        return "\n".join(lines) + "\n"


def _status(value, bound) -> str:
    return "PASS" if value <= bound else "FAIL"


# ---------------------------------------------------------------------------
# exact contract checks


def kraft_contexts(provider, n: int) -> list[CodeContext]:
    if provider.domain_kind == "integer":
        part = build_partition(n)
        return [CodeContext(n)] + [CodeContext(n, cell=c) for c in part.cells()]
    return [CodeContext(n)] + [CodeContext(n, k) for k in range(n + 1)]


def _ctx_label(ctx: CodeContext) -> str:
    if ctx.cell is not None:
        return f"cell={ctx.cell.start}..{ctx.cell.stop - 1}"
    if ctx.k is not None:
        return f"k={ctx.k}"
    return "all"


def check_kraft(provider_name: str, n: int) -> list[Check]:
    provider = get_provider(provider_name)
    if not provider.kraft_certified:
        return [Check(f"kraft/{provider_name}", n, None, None, Fraction(1), "SKIP", "not kraft_certified")]
    out = []
    for ctx in kraft_contexts(provider, n):
        total = kraft_sum(provider, ctx)
        out.append(Check(f"kraft/{provider_name}/{_ctx_label(ctx)}", n, None, total, Fraction(1), _status(total, 1)))
    return out


def check_expectation(test_name: str, n: int, p_grid: Iterable[Fraction]) -> list[Check]:
    test = get_test(test_name)
    if not test.kraft_certified:
        return [Check(f"expect/{test_name}", n, None, None, Fraction(1), "SKIP", "not kraft_certified")]
    out = []
    for P in measures_for(test, n, p_grid):
        value = verify_expectation(test, P)
        if test.target_kind == COUNTCLASS:
            out.append(Check(f"expect/{test_name}/k={P.k}", n, None, value, Fraction(1), _status(value, 1)))
        else:
            out.append(Check(f"expect/{test_name}", n, P.p, value, Fraction(1), _status(value, 1)))
    return out


def check_partition(n: int) -> Check:
    """Cells of build_partition(n) against an independent reading of the anchors."""
    ok = partition_is_valid(n)
    return Check("partition", n, None, int(ok), 1, "PASS" if ok else "FAIL")


def partition_is_valid(n: int) -> bool:
    part = build_partition(n)
    a = anchors(n)
    lo, hi, s = part.cell_lo, part.cell_hi, part.cell_s
    if lo[0] != 0 or hi[-1] != n or np.any(lo > hi) or np.any(lo[1:] != hi[:-1] + 1):
        return False
    # each cell lies in its half-open anchor interval
    upper = np.append(a, np.inf)[s + 1]
    if np.any(lo < a[s]) or np.any(hi >= upper):
        return False
    # and every nonempty interval is represented
    last = len(a) - 1
    expected = sum(1 for j in range(len(a)) if math.ceil(a[j]) <= (n if j == last else min(n, math.ceil(a[j + 1]) - 1)))
    if expected != part.num_cells:
        return False
    cells = part.cells()
    return cells[0] == range(0, 1) and cells[-1] == range(n, n + 1)


def check_basis_factorized(n: int, p_grid: Iterable[Fraction], count_q: str = "cell") -> Check:
    """Max |D(x|B,q) - D(k|bin,r)| over all x and p, for q = r * uniform(class)."""
    r = count_distribution(count_q)
    q = TwoPart(r, "uniform")
    worst = 0
    for p in p_grid:
        B = MeasureSpec.bernoulli(n, p)
        b = MeasureSpec.binomial(n, p)
        for x in all_bitstrings(n):
            if B.prob(x) == 0:
                continue
            worst = max(worst, abs(lr_test(q, x, B) - lr_test(r, x.k, b)))
    return Check(f"basis-factorized/{count_q}", n, None, worst, 2, _status(worst, 2))


def measure_normalization(n: int, p: Fraction) -> tuple[Fraction, Fraction]:
    """Exact total mass of B_{n,p} over {0,1}^n and of bin_{n,p} over 0..n."""
    B = MeasureSpec.bernoulli(n, p)
    b = MeasureSpec.binomial(n, p)
    return sum((B.prob(x) for x in all_bitstrings(n)), Fraction(0)), sum((b.prob(k) for k in range(n + 1)), Fraction(0))


def run_validity_sweep(spec: SweepSpec) -> Ledger:
    head = f"validity sweep mode={spec.mode} n={list(spec.n_range)} seed={spec.seed}"
    if spec.mode == "sampled":
        head += f" generator=PCG64 draws={spec.sample_count}"
    ledger = Ledger(header=[head])
    if spec.mode == "sampled":
        return _sampled_ledger(spec, ledger)
    test_names = spec.tests if spec.tests is not None else tuple(sorted(registered_tests()))
    provider_names = spec.providers if spec.providers is not None else tuple(sorted(providers()))
    for n in spec.n_range:
        for name in test_names:
            for c in check_expectation(name, n, spec.p_grid):
                ledger.add(c)
        for name in provider_names:
            for c in check_kraft(name, n):
                ledger.add(c)
        ledger.add(check_partition(n))
    return ledger


# ---------------------------------------------------------------------------
# residual statistics


@dataclass(frozen=True)
class ResidualRow:
    n: int
    count: int
    max_abs_residual_thm1: float
    mean_abs_residual_thm1: float
    histogram_thm1: tuple[tuple[int, int], ...]
    max_abs_residual_basis: float
    max_estimator_gap: int
    min_estimator_gap: int
    max_count_estimator_gap: int
    max_cell_reading_gap: float
    max_count_reading_gap: float
    p_grid_size: int

    def csv(self) -> str:
        return f"{self.n},{self.max_abs_residual_thm1!r},{self.max_estimator_gap},{self.p_grid_size}"


CSV_HEADER = "n,max_abs_residual_thm1,max_estimator_gap,p_grid_size"


def sample_bits(n: int, count: int, seed: int, p: Fraction = Fraction(1, 2)) -> np.ndarray:
    """``count`` draws from B_{n,p} using numpy's PCG64 generator."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return (rng.random((count, n)) < float(p)).astype(np.uint8)


def residual_row(n: int, bits: np.ndarray, config: Config = DEFAULT_CONFIG) -> ResidualRow:
    eng = Engine(n, config)
    f = eng.evaluate(bits)
    seq_gap, count_gap = eng.estimator_gaps(bits)
    res = np.abs(f["residual_thm1"])
    # histogram of |residual| by whole bits
    buckets, counts = np.unique(np.floor(res).astype(np.int64), return_counts=True)
    d_bin = f["d_bin_grid"].astype(np.float64)
    return ResidualRow(
        n=n,
        count=len(bits),
        max_abs_residual_thm1=float(res.max()),
        mean_abs_residual_thm1=round(float(res.mean()), 12),
        histogram_thm1=tuple(zip(buckets.tolist(), counts.tolist())),
        max_abs_residual_basis=float(np.abs(f["residual_basis"]).max()),
        max_estimator_gap=int(seq_gap.max()),
        min_estimator_gap=int(seq_gap.min()),
        max_count_estimator_gap=int(count_gap.max()),
        max_cell_reading_gap=float(np.abs(d_bin - f["d_bin_partition_cell"]).max()),
        max_count_reading_gap=float(np.abs(d_bin - f["d_bin_partition_count"]).max()),
        p_grid_size=len(eng.grid),
    )


def run_residual_sweep(spec: SweepSpec) -> list[ResidualRow]:
    rows = []
    for n in spec.n_range:
        if spec.mode == "exhaustive":
            if n > RESIDUAL_EXHAUSTIVE_MAX_N:
                raise ResourceError(f"exhaustive residual sweep requires n <= {RESIDUAL_EXHAUSTIVE_MAX_N}")
            bits = kernels.enumerate_bits(n)
        else:
            bits = sample_bits(n, spec.sample_count, spec.seed, spec.sample_p)
        rows.append(residual_row(n, bits, spec.config))
    return rows


def _sampled_ledger(spec: SweepSpec, ledger: Ledger) -> Ledger:
    for row in run_residual_sweep(spec):
        for name, value in (
            ("residual-thm1/max", row.max_abs_residual_thm1),
            ("residual-thm1/mean", row.mean_abs_residual_thm1),
            ("residual-basis/max", row.max_abs_residual_basis),
            ("estimator-gap/max", row.max_estimator_gap),
            ("estimator-gap-count/max", row.max_count_estimator_gap),
        ):
            ledger.add(Check(name, row.n, spec.sample_p, value, None, "SKIP", "sampled statistic"))
    return ledger


# ---------------------------------------------------------------------------
# the two readings of the binomial-deficiency formula


@dataclass(frozen=True)
class ReadingRow:
    n: int
    num_cells: int
    max_cell_gap: float
    max_count_gap: float
    k0_d_bin_grid: int
    k0_cell_reading: float
    k0_count_reading: float
    verdict: str


def reading_comparison(n_range: Iterable[int], config: Config = DEFAULT_CONFIG) -> list[ReadingRow]:
    rows = []
    for n in n_range:
        if n > RESIDUAL_EXHAUSTIVE_MAX_N:
            raise ResourceError(f"reading comparison is exhaustive over k; n <= {RESIDUAL_EXHAUSTIVE_MAX_N}")
        eng = Engine(n, config)
        d_bin = eng.d_bin_grid.astype(np.float64)
        cell = eng.d_bin_cell.astype(np.float64)
        count = eng.d_bin_count.astype(np.float64)
        cell_gap = float(np.abs(d_bin - cell).max())
        count_gap = float(np.abs(d_bin - count).max())
        verdict = "cell" if cell_gap < count_gap else ("count" if count_gap < cell_gap else "tie")
        rows.append(
            ReadingRow(n, eng.partition.num_cells, cell_gap, count_gap, int(d_bin[0]), float(cell[0]), float(count[0]), verdict)
        )
    return rows


# ---------------------------------------------------------------------------
# partition geometry


@dataclass(frozen=True)
class PartitionAudit:
    n: int
    valid: bool
    max_anchor_error: float
    min_width_ratio: float
    max_width_ratio: float


def audit_partition(n: int, widths: bool = False) -> PartitionAudit:
    a = anchors(n)
    s = np.arange(len(a))
    err = float(np.abs(a - theta(n, s / 2)).max())
    lo_r = hi_r = math.nan
    if widths and n >= 2:
        r = width_ratios(build_partition(n))
        lo_r, hi_r = float(r.min()), float(r.max())
    return PartitionAudit(n, partition_is_valid(n), err, lo_r, hi_r)


def brute_width_ratio(n: int, k: int) -> float:
    """Width of k's cell by scanning the anchors directly; independent of cell_of."""
    a = anchors(n)
    for j in range(len(a)):
        hi = a[j + 1] if j + 1 < len(a) else math.inf
        if a[j] <= k < hi:
            width = sum(1 for i in range(max(0, math.ceil(a[j])), min(n, math.ceil(hi) - 1 if hi < math.inf else n) + 1))
            return width / float(std_estimate(n, k))
    raise AssertionError("anchors do not cover k")


# ---------------------------------------------------------------------------
# pointwise mixture dominance


def check_mixture_dominance(n: int, p_grid: Iterable[Fraction], kind: str = "sequence") -> Check:
    """min over obj, P of D - (T_i - C_i) for the default mixture; must be >= 0."""
    from .randtests import COUNT, SEQUENCE, default_mixture, default_weighting

    target = SEQUENCE if kind == "sequence" else COUNT
    D = default_mixture(target)
    weighting = default_weighting(target)
    worst = None
    for P in measures_for(D, n, p_grid):
        for obj in P.outcomes():
            if P.prob(obj) == 0:
                continue
            d = D(obj, P)
            for t, w in weighting.entries:
                margin = d - (t(obj, P) - weighting.penalty(t.name))
                worst = margin if worst is None else min(worst, margin)
    return Check(f"mixture-dominance/{kind}", n, None, worst, 0, "PASS" if worst >= 0 else "FAIL")


def degenerate_values(n: int, config: Config = DEFAULT_CONFIG) -> tuple[int, int, int]:
    """(d_bern_grid(0^n), d_bern_grid(1^n), d_bin_grid(0)) for the configured q.

    Evaluated directly from the distributions rather than through Engine, so
    large n stays cheap.
    """
    q = TwoPart(count_distribution(config.count_q), config.code)
    grid = _grid_points(n, config.grid, config.fine_step)
    zeros, ones = BitString([0] * n), BitString([1] * n)
    return (
        bernoulli_deficiency(zeros, q, grid, config.anchor),
        bernoulli_deficiency(ones, q, grid, config.anchor),
        binomial_deficiency_grid(0, n, q.count, grid, config.anchor),
    )
