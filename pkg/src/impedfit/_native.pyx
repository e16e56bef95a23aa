# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels: piecewise profiles, section lookup, torque law.

Mirrors _purepy exactly (same Horner order, same half-open section rule).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def profile_values(const double[::1] coeffs, double swing_value, double stance_end,
                   const double[::1] t):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = coeffs.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc, x
    for i in range(n):
        x = t[i]
        if x < stance_end:
            acc = coeffs[m - 1]
            for j in range(m - 2, -1, -1):
                acc = acc * x + coeffs[j]
            o[i] = acc
        else:
            o[i] = swing_value
    return out


def section_indices(const double[::1] boundaries, const double[::1] t):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t last = boundaries.shape[0] - 2
    out = np.empty(n, dtype=np.intp)
    cdef cnp.intp_t[::1] o = out
    cdef Py_ssize_t i, j
    for i in range(n):
        j = 0
        while j < last and t[i] >= boundaries[j + 1]:
            j += 1
        o[i] = j
    return out


def schedule_values(const double[::1] boundaries, const double[::1] angles, const double[::1] t):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t last = boundaries.shape[0] - 2
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    for i in range(n):
        j = 0
        while j < last and t[i] >= boundaries[j + 1]:
            j += 1
        o[i] = angles[j]
    return out


def torque_values(const double[::1] k_coeffs, double k_swing,
                  const double[::1] d_coeffs, double d_swing, double stance_end,
                  const double[::1] boundaries, const double[::1] angles,
                  const double[::1] theta, const double[::1] theta_dot, const double[::1] t):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t mk = k_coeffs.shape[0]
    cdef Py_ssize_t md = d_coeffs.shape[0]
    cdef Py_ssize_t last = boundaries.shape[0] - 2
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double x, stiff, damp
    for i in range(n):
        x = t[i]
        if x < stance_end:
            stiff = k_coeffs[mk - 1]
            for j in range(mk - 2, -1, -1):
                stiff = stiff * x + k_coeffs[j]
            damp = d_coeffs[md - 1]
            for j in range(md - 2, -1, -1):
                damp = damp * x + d_coeffs[j]
        else:
            stiff = k_swing
            damp = d_swing
        j = 0
        while j < last and x >= boundaries[j + 1]:
            j += 1
        o[i] = stiff * (theta[i] - angles[j]) + damp * theta_dot[i]
    return out
