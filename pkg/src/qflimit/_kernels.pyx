# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Signatures mirror ``_kernels_py``."""
import numpy as np

from libc.stdint cimport int64_t


cdef enum:
    RB = 16


def edge_quadratic(const double[:, ::1] X, const int64_t[::1] indptr,
                   const int64_t[::1] indices):
    """Row-wise ``sum_u X[r, u] * sum_{v in N+(u)} X[r, v]`` over an upper CSR.

    Rows are handled ``RB`` at a time through a transposed buffer so the
    innermost loop runs over contiguous replications.
    """
    cdef Py_ssize_t B = X.shape[0], n = X.shape[1]
    cdef Py_ssize_t r0, r, u, w
    cdef int64_t k, v
    cdef double inner[RB]
    cdef double acc[RB]
    out = np.zeros(B, dtype=np.float64)
    buf_arr = np.zeros((n, RB), dtype=np.float64)
    cdef double[::1] res = out
    cdef double[:, ::1] buf = buf_arr
    with nogil:
        r0 = 0
        while r0 < B:
            w = B - r0
            if w > RB:
                w = RB
            for u in range(n):
                for r in range(w):
                    buf[u, r] = X[r0 + r, u]
                for r in range(w, RB):
                    buf[u, r] = 0.0
            for r in range(RB):
                acc[r] = 0.0
            for u in range(n):
                if indptr[u] == indptr[u + 1]:
                    continue
                for r in range(RB):
                    inner[r] = 0.0
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    for r in range(RB):
                        inner[r] += buf[v, r]
                for r in range(RB):
                    acc[r] += buf[u, r] * inner[r]
            for r in range(w):
                res[r0 + r] = acc[r]
            r0 += RB
    return out


def codegree_sums(const int64_t[::1] indptr, const int64_t[::1] indices, Py_ssize_t n):
    """Pair sums of co-degrees over a symmetric CSR.

    Returns ``(sum_{u<v} C(c_uv, 2), sum_{u<v} c_uv**2, sum_{uv in E} c_uv)``.
    """
    cnt_arr = np.zeros(n, dtype=np.int64)
    touched_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] cnt = cnt_arr
    cdef int64_t[::1] touched = touched_arr
    cdef Py_ssize_t u, i, nt
    cdef int64_t a, b, v, w, c
    cdef int64_t pairs = 0, squares = 0, tri = 0
    with nogil:
        for u in range(n):
            nt = 0
            for a in range(indptr[u], indptr[u + 1]):
                v = indices[a]
                for b in range(indptr[v], indptr[v + 1]):
                    w = indices[b]
                    if w > u:
                        if cnt[w] == 0:
                            touched[nt] = w
                            nt = nt + 1
                        cnt[w] = cnt[w] + 1
            for a in range(indptr[u], indptr[u + 1]):
                v = indices[a]
                if v > u:
                    tri = tri + cnt[v]
            for i in range(nt):
                w = touched[i]
                c = cnt[w]
                pairs = pairs + c * (c - 1) // 2
                squares = squares + c * c
                cnt[w] = 0
    return int(pairs), int(squares), int(tri)
