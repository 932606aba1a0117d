# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
# cython: language_level=3
"""Compiled DTW kernel.

Arithmetic-identical to _dtw_py.dtw_pair: |x_i - y_j| cost, unit steps
{diagonal, vertical, horizontal}, backtracked path length with the
diagonal > vertical > horizontal tie-break. All math in IEEE double.
"""

from libc.math cimport INFINITY, fabs
from libc.stdlib cimport free, malloc

IMPLEMENTATION = "compiled"


cdef double _fill(double* D, const double* x, const double* y,
                  Py_ssize_t n, Py_ssize_t m, Py_ssize_t band) nogil:
    cdef Py_ssize_t i, j, lo, hi
    cdef double c, best, v, h
    for i in range(n * m):
        D[i] = INFINITY
    D[0] = fabs(x[0] - y[0])
    for i in range(n):
        if band < 0:
            lo = 0
            hi = m - 1
        else:
            lo = i - band if i > band else 0
            hi = i + band if i + band < m - 1 else m - 1
        for j in range(lo, hi + 1):
            if i == 0 and j == 0:
                continue
            c = fabs(x[i] - y[j])
            best = INFINITY
            if i > 0 and j > 0:
                best = D[(i - 1) * m + j - 1]
            if i > 0:
                v = D[(i - 1) * m + j]
                if v < best:
                    best = v
            if j > 0:
                h = D[i * m + j - 1]
                if h < best:
                    best = h
            D[i * m + j] = c + best
    return D[n * m - 1]


cdef Py_ssize_t _backtrack(const double* D, Py_ssize_t n, Py_ssize_t m) nogil:
    cdef Py_ssize_t i = n - 1, j = m - 1, plen = 1
    cdef double d, v, h
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            d = D[(i - 1) * m + j - 1]
            v = D[(i - 1) * m + j]
            h = D[i * m + j - 1]
            if d <= v and d <= h:
                i -= 1
                j -= 1
            elif v <= h:
                i -= 1
            else:
                j -= 1
        elif i > 0:
            i -= 1
        else:
            j -= 1
        plen += 1
    return plen


def dtw_pair(const double[::1] x, const double[::1] y, Py_ssize_t band=-1):
    """DTW raw cost and backtracked path length for two 1-D series."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = y.shape[0]
    if n == 0 or m == 0:
        raise ValueError("series must be non-empty")
    cdef double* D = <double*> malloc(n * m * sizeof(double))
    if D == NULL:
        raise MemoryError()
    cdef double raw
    cdef Py_ssize_t plen
    try:
        with nogil:
            raw = _fill(D, &x[0], &y[0], n, m, band)
            plen = _backtrack(D, n, m)
    finally:
        free(D)
    return raw, plen
