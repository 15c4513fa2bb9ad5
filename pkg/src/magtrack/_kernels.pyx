# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled per-sample kernels.

Byte-for-byte mirror of ``_kernels_py`` (see that module for the
contracts).  Typed memoryviews keep the per-call overhead at a couple of
microseconds; no numpy C API is used.
"""
from libc.math cimport INFINITY, M_PI, cos, hypot, pow, sin, sqrt


def sos_step(double[:, ::1] sos, double[:, ::1] zi, double x):
    cdef Py_ssize_t i, n = sos.shape[0]
    cdef double y
    for i in range(n):
        y = sos[i, 0] * x + zi[i, 0]
        zi[i, 0] = sos[i, 1] * x - sos[i, 4] * y + zi[i, 1]
        zi[i, 1] = sos[i, 2] * x - sos[i, 5] * y
        x = y
    return x


def goertzel_window(double[::1] x, Py_ssize_t k):
    cdef Py_ssize_t j, n = x.shape[0]
    cdef double w = 2.0 * M_PI * k / n
    cdef double coeff = 2.0 * cos(w)
    cdef double s0, s1 = 0.0, s2 = 0.0
    cdef double re, im
    for j in range(n):
        s0 = x[j] + coeff * s1 - s2
        s2 = s1
        s1 = s0
    re = s1 - s2 * cos(w)
    im = s2 * sin(w)
    return 2.0 * sqrt(re * re + im * im) / n


def goertzel_ring(double[:, ::1] buf, Py_ssize_t head, Py_ssize_t k, Py_ssize_t axis):
    cdef Py_ssize_t j, idx, n = buf.shape[0]
    cdef double w = 2.0 * M_PI * k / n
    cdef double coeff = 2.0 * cos(w)
    cdef double s0, s1 = 0.0, s2 = 0.0
    cdef double re, im
    for j in range(n):
        idx = head + j
        if idx >= n:
            idx -= n
        s0 = buf[idx, axis] + coeff * s1 - s2
        s2 = s1
        s1 = s0
    re = s1 - s2 * cos(w)
    im = s2 * sin(w)
    return 2.0 * sqrt(re * re + im * im) / n


def solve_position(double h20_sq, double h30_sq, double k20, double k30,
                   double d, double c20, double c30, int max_iter, double tol):
    cdef double x = 0.0, y = 0.0, r20 = 0.0, r30 = 0.0
    cdef double px = 0.0, py = 0.0, delta = INFINITY
    cdef double y2, den20, den30
    cdef bint feasible = True
    cdef int i, iterations = 0
    for i in range(max_iter):
        r20 = pow(k20 * (3.0 * c20 + 1.0) / h20_sq, 1.0 / 6.0)
        r30 = pow(k30 * (3.0 * c30 + 1.0) / h30_sq, 1.0 / 6.0)
        x = (r20 * r20 - r30 * r30 + d * d) / (2.0 * d)
        y2 = r20 * r20 - x * x
        if y2 >= 0.0:
            y = sqrt(y2)
            feasible = True
        else:
            y = 0.0
            feasible = False
        den20 = x * x + y * y
        den30 = (d - x) * (d - x) + y * y
        c20 = (y * y / den20) if den20 > 0.0 else 0.0
        c30 = (y * y / den30) if den30 > 0.0 else 0.0
        iterations = i + 1
        if i > 0:
            delta = hypot(x - px, y - py)
            if delta < tol:
                break
        px = x
        py = y
    return (x, y, r20, r30, c20, c30, iterations, delta, feasible)
