# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled jet kernels.

A depth-``d`` jet over ``n`` variables is stored as a flat C-ordered float64
buffer of shape ``(n+1,) * d``. Axis 0 is the outermost nesting level; index 0
along an axis selects the value block, index ``i`` the ``i``-th partial block.
A shallower jet embeds into a deeper one as a zero-padded prefix.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memset

import numpy as np


cdef inline Py_ssize_t _ipow(Py_ssize_t base, int exp) noexcept nogil:
    cdef Py_ssize_t r = 1
    cdef int i
    for i in range(exp):
        r *= base
    return r


cdef void _mul_acc(const double* a, int da, const double* b, int db,
                   double* out, Py_ssize_t n1) noexcept nogil:
    # out += a * b, with out at depth max(da, db)
    cdef Py_ssize_t i, s
    if da == 0 and db == 0:
        out[0] += a[0] * b[0]
        return
    if da > db:
        s = _ipow(n1, da - 1)
        for i in range(n1):
            _mul_acc(a + i * s, da - 1, b, db, out + i * s, n1)
    elif db > da:
        s = _ipow(n1, db - 1)
        for i in range(n1):
            _mul_acc(a, da, b + i * s, db - 1, out + i * s, n1)
    else:
        s = _ipow(n1, da - 1)
        _mul_acc(a, da - 1, b, db - 1, out, n1)
        for i in range(1, n1):
            _mul_acc(a, da - 1, b + i * s, db - 1, out + i * s, n1)
            _mul_acc(a + i * s, da - 1, b, db - 1, out + i * s, n1)


def mul(const double[::1] a, int da, const double[::1] b, int db, int n):
    """Product of two jets; result has depth ``max(da, db)``."""
    cdef int d = da if da > db else db
    cdef Py_ssize_t n1 = n + 1
    out = np.zeros(_ipow(n1, d))
    cdef double[::1] o = out
    with nogil:
        _mul_acc(&a[0], da, &b[0], db, &o[0], n1)
    return out


def compose(const double[::1] x, int d, const double[::1] taylor, int n):
    """Evaluate ``sum_m taylor[m] * (x - x0)**m`` on a depth-``d`` jet.

    ``taylor[m]`` is the m-th Taylor coefficient of a scalar function at the
    value part ``x0``. Terms beyond order ``d`` vanish identically.
    """
    cdef Py_ssize_t n1 = n + 1
    cdef Py_ssize_t size = _ipow(n1, d)
    cdef int order = <int>taylor.shape[0] - 1
    cdef int m
    cdef Py_ssize_t k
    if order > d:
        order = d
    out = np.zeros(size)
    cdef double[::1] o = out
    if d == 0 or order == 0:
        o[0] = taylor[0]
        return out
    cdef double* delta = <double*>malloc(size * sizeof(double))
    cdef double* tmp = <double*>malloc(size * sizeof(double))
    if delta == NULL or tmp == NULL:
        free(delta)
        free(tmp)
        raise MemoryError()
    with nogil:
        for k in range(size):
            delta[k] = x[k]
        delta[0] = 0.0
        # Horner: r = c_K; r = r*delta + c_m
        memset(tmp, 0, size * sizeof(double))
        tmp[0] = taylor[order]
        for m in range(order - 1, -1, -1):
            memset(&o[0], 0, size * sizeof(double))
            _mul_acc(tmp, d, delta, d, &o[0], n1)
            o[0] += taylor[m]
            if m > 0:
                for k in range(size):
                    tmp[k] = o[k]
    free(delta)
    free(tmp)
    return out
