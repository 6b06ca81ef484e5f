# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Mirrors ``_pykernels`` function for function. Distances are accumulated one
coordinate at a time in index order and the extension is built with
``-ffp-contract=off`` so results match the numpy path bit for bit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


cdef inline double _sq(const double[:, ::1] a, Py_ssize_t i,
                       const double[:, ::1] b, Py_ssize_t j,
                       Py_ssize_t d) noexcept nogil:
    cdef double acc = 0.0
    cdef double diff
    cdef Py_ssize_t t
    for t in range(d):
        diff = a[i, t] - b[j, t]
        acc += diff * diff
    return acc


cdef double _select(double* buf, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    """Place the k-th smallest (0-based) at buf[k]; everything left of it is <=."""
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j, mid
    cdef double pivot, tmp
    while hi > lo:
        mid = lo + (hi - lo) // 2
        # median of three into buf[mid]
        if buf[mid] < buf[lo]:
            tmp = buf[mid]; buf[mid] = buf[lo]; buf[lo] = tmp
        if buf[hi] < buf[lo]:
            tmp = buf[hi]; buf[hi] = buf[lo]; buf[lo] = tmp
        if buf[hi] < buf[mid]:
            tmp = buf[hi]; buf[hi] = buf[mid]; buf[mid] = tmp
        pivot = buf[mid]
        i = lo
        j = hi
        while i <= j:
            while buf[i] < pivot:
                i += 1
            while buf[j] > pivot:
                j -= 1
            if i <= j:
                tmp = buf[i]; buf[i] = buf[j]; buf[j] = tmp
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            break
    return buf[k]


cdef inline double _max_prefix(const double* buf, Py_ssize_t n) noexcept nogil:
    cdef double best = -INFINITY
    cdef Py_ssize_t t
    for t in range(n):
        if buf[t] > best:
            best = buf[t]
    return best


def kth_sq(const double[:, ::1] points, const double[:, ::1] queries, Py_ssize_t k):
    cdef Py_ssize_t m = queries.shape[0], n = points.shape[0], d = points.shape[1]
    cdef Py_ssize_t q, i
    out_arr = np.empty(m, dtype=np.float64)
    buf_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] buf = buf_arr
    with nogil:
        for q in range(m):
            for i in range(n):
                buf[i] = _sq(queries, q, points, i, d)
            out[q] = _select(&buf[0], n, k - 1)
    return out_arr


def others_pair_sq(const double[:, ::1] points, Py_ssize_t k):
    cdef Py_ssize_t n = points.shape[0], d = points.shape[1]
    cdef Py_ssize_t i, j, c
    lo_arr = np.full(n, -np.inf)
    hi_arr = np.full(n, np.inf)
    if n < 2:
        return lo_arr, hi_arr
    buf_arr = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef double[::1] buf = buf_arr
    with nogil:
        for i in range(n):
            c = 0
            for j in range(n):
                if j != i:
                    buf[c] = _sq(points, i, points, j, d)
                    c += 1
            if k <= n - 1:
                hi[i] = _select(&buf[0], n - 1, k - 1)
                if k >= 2:
                    lo[i] = _max_prefix(&buf[0], k - 1)
            elif k - 1 >= 1:
                lo[i] = _select(&buf[0], n - 1, k - 2)
    return lo_arr, hi_arr


def pvalue_counts(const double[:, ::1] points, const double[::1] lo_sq,
                  const double[::1] hi_sq, const double[:, ::1] queries,
                  Py_ssize_t k):
    cdef Py_ssize_t m = queries.shape[0], n = points.shape[0], d = points.shape[1]
    cdef Py_ssize_t q, i
    cdef long long cnt
    cdef double own, r
    out_arr = np.empty(m, dtype=np.int64)
    a_arr = np.empty(n, dtype=np.float64)
    buf_arr = np.empty(n, dtype=np.float64)
    cdef long long[::1] out = out_arr
    cdef double[::1] a = a_arr
    cdef double[::1] buf = buf_arr
    with nogil:
        for q in range(m):
            for i in range(n):
                a[i] = _sq(queries, q, points, i, d)
                buf[i] = a[i]
            own = _select(&buf[0], n, k - 1)
            cnt = 1
            for i in range(n):
                r = a[i]
                if r < lo_sq[i]:
                    r = lo_sq[i]
                if r > hi_sq[i]:
                    r = hi_sq[i]
                if r >= own:
                    cnt += 1
            out[q] = cnt
    return out_arr


def cover_counts(const double[:, ::1] points, const double[:, ::1] queries, double thr_sq):
    cdef Py_ssize_t m = queries.shape[0], n = points.shape[0], d = points.shape[1]
    cdef Py_ssize_t q, i
    cdef long long cnt
    out_arr = np.empty(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    with nogil:
        for q in range(m):
            cnt = 0
            for i in range(n):
                if _sq(queries, q, points, i, d) <= thr_sq:
                    cnt += 1
            out[q] = cnt
    return out_arr


def any_within(const double[:, ::1] centers, const double[::1] thr_sq,
               const double[:, ::1] queries):
    cdef Py_ssize_t m = queries.shape[0], n = centers.shape[0], d = queries.shape[1]
    cdef Py_ssize_t q, i
    out_arr = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    with nogil:
        for q in range(m):
            for i in range(n):
                if _sq(queries, q, centers, i, d) <= thr_sq[i]:
                    out[q] = 1
                    break
    return out_arr.view(bool)
