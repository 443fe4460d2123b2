"""Kernel selection: compiled ``_kernels`` if importable, numpy fallback otherwise.

Set ``BERNRAND_PURE=1`` to force the fallback. ``BACKEND`` names the active
implementation. Array dtypes are normalized here so both backends see the
same inputs.
"""

import os

import numpy as np

from . import _kernels_py

POS = _kernels_py.POS
NEG = _kernels_py.NEG

_impl = _kernels_py
BACKEND = "python"
if not os.environ.get("BERNRAND_PURE"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass


def _ld(a):
    return np.ascontiguousarray(a, dtype=np.longdouble)


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def grid_min_floor(log2q, k, n, log2p, log2p1, impl=None):
    """Per row i: min over grid j of floor(log2q[i] - k[i]*log2p[j] - (n-k[i])*log2p1[j]).

    Returns ``(tmin, argmin)``. Grid points under which row i is impossible
    are skipped; a row impossible everywhere gets ``POS`` and argmin -1.
    ``log2q[i] = -inf`` gives ``NEG``. Ties resolve to the lowest j.
    """
    impl = impl or _impl
    return impl.grid_min_floor(_ld(log2q), _i64(k), int(n), _ld(log2p), _ld(log2p1))


def pointwise_floor(log2q, k, n, log2p, log2p1, impl=None):
    """Same term as ``grid_min_floor`` but with one grid point per row."""
    impl = impl or _impl
    return impl.pointwise_floor(_ld(log2q), _i64(k), int(n), _ld(log2p), _ld(log2p1))


def transition_counts(bits, impl=None):
    """Rows of ``(k, first_bit, n00, n01, n10, n11)`` for a 0/1 matrix."""
    impl = impl or _impl
    return impl.transition_counts(np.ascontiguousarray(bits, dtype=np.uint8))


def cell_bounds(anchors, n, impl=None):
    """Nonempty integer cells [ceil(a_s), ceil(a_{s+1}) - 1], last one closed at n."""
    impl = impl or _impl
    return impl.cell_bounds(np.ascontiguousarray(anchors, dtype=np.float64), int(n))


def enumerate_bits(n: int) -> np.ndarray:
    """All 2^n sequences as a (2^n, n) uint8 matrix, lexicographic order."""
    if n > 24:
        raise ValueError("refusing to enumerate more than 2^24 sequences")
    idx = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
