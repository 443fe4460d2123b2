"""Compiled vs numpy kernels: wall time and output agreement.

    python benchmarks/bench_kernels.py [--n 12] [--repeat 5]

Workloads mirror what Engine does for an exhaustive sweep: every sequence of
length n against the arcsine grid (and the 1e-3 fine grid).
"""

import argparse
import math
import time

import numpy as np

from bernrand import _kernels_py, kernels
from bernrand.deficiency import _grid_points, _log2_grid
from bernrand.partition import anchors

try:
    from bernrand import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def workloads(n):
    bits = kernels.enumerate_bits(n)
    k = bits.sum(axis=1).astype(np.int64)
    rng = np.random.default_rng(0)
    log2q = np.asarray(-rng.uniform(n / 2, 2 * n, len(k)), dtype=np.longdouble)
    arc = _log2_grid(_grid_points(n, "arcsine", None))
    fine = _log2_grid(_grid_points(n, "fine", 0.001))
    big = 10**7
    return {
        f"grid_min_floor arcsine n={n} ({len(arc[0])} pts)": lambda impl: kernels.grid_min_floor(log2q, k, n, *arc, impl=impl),
        f"grid_min_floor fine n={n} ({len(fine[0])} pts)": lambda impl: kernels.grid_min_floor(log2q, k, n, *fine, impl=impl),
        f"pointwise_floor n={n}": lambda impl: kernels.pointwise_floor(log2q, k, n, arc[0][k % len(arc[0])], arc[1][k % len(arc[0])], impl=impl),
        f"transition_counts n={n}": lambda impl: kernels.transition_counts(bits, impl=impl),
        f"cell_bounds n={big}": lambda impl: kernels.cell_bounds(anchors(big), big, impl=impl),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled kernels not built; only the numpy fallback is available")
        return
    print(f"{'workload':<48} {'cython s':>10} {'numpy s':>10} {'speedup':>8}  agree")
    for name, run in workloads(args.n).items():
        tc, oc = best_of(lambda: run(_compiled), args.repeat)
        tp, op = best_of(lambda: run(_kernels_py), args.repeat)
        speed = tp / tc if tc > 0 else math.inf
        print(f"{name:<48} {tc:>10.4f} {tp:>10.4f} {speed:>7.1f}x  {'yes' if same(oc, op) else 'NO'}")


if __name__ == "__main__":
    main()
