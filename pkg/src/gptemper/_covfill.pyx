# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled covariance-matrix fills; see _covfill_py for the reference fallback."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def cov_train(double[:, ::1] x, double[::1] beta, double lambda_z,
              double lambda_s, double lambda_o, bint additive):
    """Symmetric train covariance with noise precisions on the diagonal."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, n))
    cdef double[:, ::1] k = out
    cdef Py_ssize_t i, j, l
    cdef double s, dl, diag_noise
    cdef double inv_z = 1.0 / lambda_z

    diag_noise = 1.0 / lambda_s + 1.0 / lambda_o
    for i in range(n):
        for j in range(i + 1):
            if additive:
                s = 0.0
                for l in range(d):
                    dl = x[i, l] - x[j, l]
                    s += exp(-beta[l] * dl * dl)
                s *= inv_z
            else:
                s = 0.0
                for l in range(d):
                    dl = x[i, l] - x[j, l]
                    s += beta[l] * dl * dl
                s = inv_z * exp(-s)
            if i == j:
                s += diag_noise
            k[i, j] = s
            k[j, i] = s
    return out


def cov_cross(double[:, ::1] a, double[:, ::1] b, double[::1] beta,
              double lambda_z, bint additive):
    """Noise-free cross covariance between two input sets."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((na, nb))
    cdef double[:, ::1] k = out
    cdef Py_ssize_t i, j, l
    cdef double s, dl
    cdef double inv_z = 1.0 / lambda_z

    for i in range(na):
        for j in range(nb):
            if additive:
                s = 0.0
                for l in range(d):
                    dl = a[i, l] - b[j, l]
                    s += exp(-beta[l] * dl * dl)
                s *= inv_z
            else:
                s = 0.0
                for l in range(d):
                    dl = a[i, l] - b[j, l]
                    s += beta[l] * dl * dl
                s = inv_z * exp(-s)
            k[i, j] = s
    return out
