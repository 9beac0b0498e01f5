# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: recurrence tables, tensor-product assembly, LARS step search.

Each function mirrors its counterpart in ``_kernels_py`` operation for
operation, so both backends give bit-identical results.
"""
import numpy as np

from libc.math cimport sqrt, INFINITY

cdef enum:
    LEGENDRE = 0
    HERMITE = 1


def univariate_table(const double[::1] x, int kmax, int family):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, k
    cdef double a_k, a_k1, xi
    out = np.empty((kmax + 1, n), dtype=np.float64)
    cdef double[:, ::1] t = out
    for i in range(n):
        t[0, i] = 1.0
    if kmax == 0:
        return out
    if family == LEGENDRE:
        for i in range(n):
            t[1, i] = x[i] / (1.0 / sqrt(3.0))
        for k in range(1, kmax):
            a_k = k / sqrt(4.0 * k * k - 1.0)
            a_k1 = (k + 1) / sqrt(4.0 * (k + 1) * (k + 1) - 1.0)
            for i in range(n):
                t[k + 1, i] = (x[i] * t[k, i] - a_k * t[k - 1, i]) / a_k1
    elif family == HERMITE:
        for i in range(n):
            t[1, i] = x[i]
        for k in range(1, kmax):
            a_k = sqrt(<double>k)
            a_k1 = sqrt(<double>(k + 1))
            for i in range(n):
                t[k + 1, i] = (x[i] * t[k, i] - a_k * t[k - 1, i]) / a_k1
    else:
        raise ValueError(f"unknown polynomial family code {family}")
    return out


def tensor_design(const double[:, :, ::1] tables, const long[:, ::1] alphas):
    """Return the (P, N) C-ordered product matrix; callers transpose."""
    cdef Py_ssize_t d = tables.shape[0]
    cdef Py_ssize_t n = tables.shape[2]
    cdef Py_ssize_t p = alphas.shape[0]
    cdef Py_ssize_t j, i, r
    cdef long deg
    out = np.ones((p, n), dtype=np.float64)
    cdef double[:, ::1] m = out
    for j in range(p):
        for i in range(d):
            deg = alphas[j, i]
            for r in range(n):
                m[j, r] = m[j, r] * tables[i, deg, r]
    return out


def lars_step(const double[::1] c, const double[::1] a, double big_c, double big_a,
              const unsigned char[::1] candidate, double tiny):
    cdef Py_ssize_t p = c.shape[0]
    cdef Py_ssize_t j, best = -1
    cdef double g1, g2, g, gamma = INFINITY
    for j in range(p):
        if not candidate[j]:
            continue
        g1 = INFINITY
        g2 = INFINITY
        if big_a - a[j] != 0.0:
            g1 = (big_c - c[j]) / (big_a - a[j])
            if not g1 > tiny:
                g1 = INFINITY
        if big_a + a[j] != 0.0:
            g2 = (big_c + c[j]) / (big_a + a[j])
            if not g2 > tiny:
                g2 = INFINITY
        g = g1 if g1 <= g2 else g2
        if g < gamma:
            gamma = g
            best = j
    return gamma, best
