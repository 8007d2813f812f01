# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`ncspectra._pykernels`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


cdef inline Py_ssize_t _lower_bound(const double[::1] a, double x) noexcept nogil:
    # first index with a[i] >= x
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def tensor_counts(const double[::1] v1, const double[::1] w1,
                  const double[::1] v2_sorted, const double[::1] cw2,
                  const double[::1] grid):
    """Counting function of the product spectrum, one value per grid point.

    ``cw2[i]`` is the sum of the weights of ``v2_sorted[:i]`` (length n2 + 1).
    """
    cdef Py_ssize_t n1 = v1.shape[0], ng = grid.shape[0], i, g, idx
    cdef double t, v, acc, x
    out = np.zeros(ng, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for g in range(ng):
            t = grid[g]
            acc = 0.0
            for i in range(n1):
                v = v1[i]
                if v < t:
                    x = sqrt(t * t - v * v)
                    idx = _lower_bound(v2_sorted, x)
                    acc += w1[i] * cw2[idx]
            o[g] = acc
    return out


def edge_quotient_max(const double complex[::1] fsrc, const double complex[::1] fdst,
                      const double[::1] lengths):
    """max |fdst - fsrc| / length over edges, 0.0 for an empty edge set."""
    cdef Py_ssize_t n = fsrc.shape[0], i
    cdef double best = 0.0, q, dr, di
    with nogil:
        for i in range(n):
            dr = fdst[i].real - fsrc[i].real
            di = fdst[i].imag - fsrc[i].imag
            q = sqrt(dr * dr + di * di) / lengths[i]
            if q > best:
                best = q
    return best
