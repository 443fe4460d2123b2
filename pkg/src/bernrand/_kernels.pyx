# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics mirror ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floorl, ceil, INFINITY

cnp.import_array()

cdef long long POS = 1LL << 62
cdef long long NEG = -(1LL << 62)


cdef inline long long _floor_term(long double lq, long long k, long long n,
                                  long double lp, long double lp1) nogil:
    # floor(log2 q - k log2 p - (n-k) log2(1-p)); POS when P{x} = 0
    cdef long double v
    if lq == -INFINITY:
        return NEG
    v = lq
    if k > 0:
        if lp == -INFINITY:
            return POS
        v -= k * lp
    if n - k > 0:
        if lp1 == -INFINITY:
            return POS
        v -= (n - k) * lp1
    return <long long>floorl(v)


def grid_min_floor(long double[::1] log2q, long long[::1] k, long long n,
                   long double[::1] log2p, long double[::1] log2p1):
    cdef Py_ssize_t m = log2q.shape[0], g = log2p.shape[0], i, j
    cdef long long t, best, arg
    out = np.empty(m, dtype=np.int64)
    args = np.empty(m, dtype=np.int64)
    cdef long long[::1] o = out
    cdef long long[::1] a = args
    with nogil:
        for i in range(m):
            best = POS
            arg = -1
            for j in range(g):
                t = _floor_term(log2q[i], k[i], n, log2p[j], log2p1[j])
                if t < best:
                    best = t
                    arg = j
            o[i] = best
            a[i] = arg
    return out, args


def pointwise_floor(long double[::1] log2q, long long[::1] k, long long n,
                    long double[::1] log2p, long double[::1] log2p1):
    cdef Py_ssize_t m = log2q.shape[0], i
    out = np.empty(m, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = _floor_term(log2q[i], k[i], n, log2p[i], log2p1[i])
    return out


def transition_counts(cnp.uint8_t[:, ::1] bits):
    cdef Py_ssize_t m = bits.shape[0], n = bits.shape[1], i, j
    cdef int prev, cur
    out = np.zeros((m, 6), dtype=np.int64)
    cdef long long[:, ::1] o = out
    with nogil:
        for i in range(m):
            if n == 0:
                continue
            prev = bits[i, 0]
            o[i, 0] = prev
            o[i, 1] = prev
            for j in range(1, n):
                cur = bits[i, j]
                o[i, 0] += cur
                o[i, 2 + 2 * prev + cur] += 1
                prev = cur
    return out


def cell_bounds(double[::1] anchors, long long n):
    cdef Py_ssize_t s_count = anchors.shape[0], s, c = 0
    cdef long long lo, hi
    s_idx = np.empty(s_count, dtype=np.int64)
    los = np.empty(s_count, dtype=np.int64)
    his = np.empty(s_count, dtype=np.int64)
    cdef long long[::1] si = s_idx
    cdef long long[::1] l = los
    cdef long long[::1] h = his
    with nogil:
        for s in range(s_count):
            lo = <long long>ceil(anchors[s])
            if s + 1 < s_count:
                hi = <long long>ceil(anchors[s + 1]) - 1
                if hi > n:
                    hi = n
            else:
                hi = n
            if lo < 0:
                lo = 0
            if lo <= hi:
                si[c] = s
                l[c] = lo
                h[c] = hi
                c += 1
    return s_idx[:c], los[:c], his[:c]
