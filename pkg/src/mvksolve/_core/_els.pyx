# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluation kernels for the exponential-loss residual system
(identity combination operators).  Mirrors the numpy reference in
``_ref.py``; the dense matrix-vector products stay in BLAS while the
block bookkeeping runs in typed loops."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


cdef void _compute_weights(double[::1] f, double[::1] y_flat,
                           cnp.intp_t[::1] y_offs, cnp.intp_t[::1] d_offs,
                           Py_ssize_t l, double[::1] w) noexcept:
    cdef Py_ssize_t j, k, m
    cdef double acc, diff
    for j in range(l):
        acc = 0.0
        m = y_offs[j + 1] - y_offs[j]
        for k in range(m):
            diff = y_flat[y_offs[j] + k] - f[d_offs[j] + k]
            acc += diff * diff
        w[j] = exp(-acc)


def els_residual(a, K, M, y_flat, y_offs, d_offs, Py_ssize_t l,
                 double gamma_A, double gamma_I):
    cdef cnp.ndarray[double, ndim=1] a_ = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] K_ = np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f = np.dot(K_, a_)
    cdef cnp.ndarray[double, ndim=1] H = a_ + (gamma_I / gamma_A) * np.dot(M, f)
    cdef double[::1] yv = np.ascontiguousarray(y_flat, dtype=np.float64)
    cdef cnp.intp_t[::1] yo = np.ascontiguousarray(y_offs, dtype=np.intp)
    cdef cnp.intp_t[::1] do = np.ascontiguousarray(d_offs, dtype=np.intp)
    cdef double[::1] fv = f
    cdef double[::1] Hv = H
    cdef double[::1] av = a_
    cdef double[:, ::1] Kv = K_
    cdef double[::1] w = np.empty(l)
    _compute_weights(fv, yv, yo, do, l, w)
    cdef double c = 1.0 / (l * gamma_A)
    cdef Py_ssize_t i, j, r, q
    cdef double s
    for i in range(l):
        for r in range(do[i], do[i + 1]):
            s = 0.0
            for j in range(l):
                for q in range(do[j], do[j + 1]):
                    s += w[j] * Kv[r, q] * av[q]
            Hv[r] += c * (s - yv[yo[i] + (r - do[i])])
    return H


def els_jacobian_R(a, K, MK, y_flat, y_offs, d_offs, Py_ssize_t l,
                   double gamma_A, double gamma_I):
    cdef cnp.ndarray[double, ndim=1] a_ = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] K_ = np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f = np.dot(K_, a_)
    cdef cnp.ndarray[double, ndim=2] R = gamma_I * np.ascontiguousarray(
        MK, dtype=np.float64).copy()
    cdef double[::1] yv = np.ascontiguousarray(y_flat, dtype=np.float64)
    cdef cnp.intp_t[::1] yo = np.ascontiguousarray(y_offs, dtype=np.intp)
    cdef cnp.intp_t[::1] do = np.ascontiguousarray(d_offs, dtype=np.intp)
    cdef double[::1] fv = f
    cdef double[::1] av = a_
    cdef double[:, ::1] Kv = K_
    cdef double[:, ::1] Rv = R
    cdef Py_ssize_t N = a_.shape[0]
    cdef Py_ssize_t lab = do[l]
    cdef double[::1] w = np.empty(l)
    _compute_weights(fv, yv, yo, do, l, w)
    cdef cnp.ndarray[double, ndim=1] t = np.empty(N)
    cdef cnp.ndarray[double, ndim=1] s = np.empty(N)
    cdef double[::1] tv = t
    cdef double[::1] sv = s
    cdef Py_ssize_t j, r, q, k
    cdef double acc, coeff
    for j in range(l):
        coeff = w[j] / l
        # direct weighted coupling on labeled rows
        for r in range(lab):
            for q in range(do[j], do[j + 1]):
                Rv[r, q] += coeff * Kv[r, q]
        # rank-one update from the weight derivative
        for r in range(N):
            acc = 0.0
            for q in range(do[j], do[j + 1]):
                acc += Kv[r, q] * av[q]
            tv[r] = acc if r < lab else 0.0
            acc = 0.0
            for q in range(do[j], do[j + 1]):
                acc += Kv[r, q] * (fv[q] - yv[yo[j] + (q - do[j])])
            sv[r] = -2.0 * coeff * acc
        for r in range(lab):
            for k in range(N):
                Rv[r, k] += tv[r] * sv[k]
    return R
