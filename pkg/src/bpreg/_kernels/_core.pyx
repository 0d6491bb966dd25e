# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the polygamma kernels.

Same construction as the NumPy reference backend: recurrence shift of the
argument above 10 followed by a Bernoulli-number asymptotic expansion.
"""

from libc.math cimport log

import numpy as np

DEF SHIFT = 10.0
DEF HALF_LN_TWO_PI = 0.9189385332046727417803297


cdef inline double _lgamma1(double x) nogil:
    cdef double acc = 0.0
    cdef double z = x
    cdef double r, w, s
    while z < SHIFT:
        acc += log(z)
        z += 1.0
    r = 1.0 / z
    w = r * r
    s = -3617.0 / 122400.0
    s = s * w + 1.0 / 156.0
    s = s * w - 691.0 / 360360.0
    s = s * w + 1.0 / 1188.0
    s = s * w - 1.0 / 1680.0
    s = s * w + 1.0 / 1260.0
    s = s * w - 1.0 / 360.0
    s = s * w + 1.0 / 12.0
    return (z - 0.5) * log(z) - z + HALF_LN_TWO_PI + r * s - acc


cdef inline double _digamma1(double x) nogil:
    cdef double acc = 0.0
    cdef double z = x
    cdef double r, w, s
    while z < SHIFT:
        acc += 1.0 / z
        z += 1.0
    r = 1.0 / z
    w = r * r
    s = 1.0 / 12.0
    s = s * w - 691.0 / 32760.0
    s = s * w + 1.0 / 132.0
    s = s * w - 1.0 / 240.0
    s = s * w + 1.0 / 252.0
    s = s * w - 1.0 / 120.0
    s = s * w + 1.0 / 12.0
    return log(z) - 0.5 * r - w * s - acc


cdef inline double _trigamma1(double x) nogil:
    cdef double acc = 0.0
    cdef double z = x
    cdef double r, w, s
    while z < SHIFT:
        acc += 1.0 / (z * z)
        z += 1.0
    r = 1.0 / z
    w = r * r
    s = 7.0 / 6.0
    s = s * w - 691.0 / 2730.0
    s = s * w + 5.0 / 66.0
    s = s * w - 1.0 / 30.0
    s = s * w + 1.0 / 42.0
    s = s * w - 1.0 / 30.0
    s = s * w + 1.0 / 6.0
    return r + 0.5 * w + r * w * s + acc


cdef inline double _tetragamma1(double x) nogil:
    cdef double acc = 0.0
    cdef double z = x
    cdef double r, w, s
    while z < SHIFT:
        acc += 2.0 / (z * z * z)
        z += 1.0
    r = 1.0 / z
    w = r * r
    s = -8983.0 / 2730.0
    s = s * w + 5.0 / 6.0
    s = s * w - 3.0 / 10.0
    s = s * w + 1.0 / 6.0
    s = s * w - 1.0 / 6.0
    s = s * w + 1.0 / 2.0
    return -(w + w * r + w * w * s) - acc


def lgamma(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _lgamma1(x[i])
    return out_arr


def digamma(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _digamma1(x[i])
    return out_arr


def trigamma(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _trigamma1(x[i])
    return out_arr


def tetragamma(double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _tetragamma1(x[i])
    return out_arr
