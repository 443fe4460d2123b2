"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import numpy as np

POS = 1 << 62
NEG = -(1 << 62)

# rows per block in grid_min_floor; bounds the (rows x grid) temporary
_BLOCK = 512


def _floor_terms(log2q, k, n, log2p, log2p1):
    # broadcasted version of the compiled _floor_term
    k = k.astype(np.longdouble)
    nk = n - k
    with np.errstate(invalid="ignore"):
        # 0 * -inf must count as 0 (k = 0 under p = 0)
        v = log2q - np.where(k > 0, k * log2p, 0) - np.where(nk > 0, nk * log2p1, 0)
    t = np.floor(np.where(np.isfinite(v), v, 0)).astype(np.int64)
    impossible = ((k > 0) & np.isneginf(log2p)) | ((nk > 0) & np.isneginf(log2p1))
    t = np.where(np.isneginf(log2q), NEG, t)
    t = np.where(impossible & ~np.isneginf(log2q), POS, t)
    return t


def grid_min_floor(log2q, k, n, log2p, log2p1):
    m = log2q.shape[0]
    out = np.empty(m, dtype=np.int64)
    args = np.empty(m, dtype=np.int64)
    for start in range(0, m, _BLOCK):
        sl = slice(start, start + _BLOCK)
        t = _floor_terms(log2q[sl, None], k[sl, None], n, log2p[None, :], log2p1[None, :])
        arg = np.argmin(t, axis=1)
        best = t[np.arange(t.shape[0]), arg]
        arg = np.where(best == POS, -1, arg)
        out[sl] = best
        args[sl] = arg
    return out, args


def pointwise_floor(log2q, k, n, log2p, log2p1):
    return _floor_terms(log2q, k, n, log2p, log2p1)


def transition_counts(bits):
    bits = np.asarray(bits, dtype=np.int64)
    m, n = bits.shape
    out = np.zeros((m, 6), dtype=np.int64)
    if n == 0:
        return out
    out[:, 0] = bits.sum(axis=1)
    out[:, 1] = bits[:, 0]
    if n > 1:
        code = 2 * bits[:, :-1] + bits[:, 1:]
        for c in range(4):
            out[:, 2 + c] = (code == c).sum(axis=1)
    return out


def cell_bounds(anchors, n):
    anchors = np.asarray(anchors, dtype=np.float64)
    lo = np.maximum(np.ceil(anchors).astype(np.int64), 0)
    hi = np.empty_like(lo)
    hi[:-1] = np.minimum(np.ceil(anchors[1:]).astype(np.int64) - 1, n)
    hi[-1] = n
    keep = lo <= hi
    return np.nonzero(keep)[0].astype(np.int64), lo[keep], hi[keep]
