"""Numpy reference implementation of the exponential-loss residual
system (identity combination operators)."""

import numpy as np


def _weights(f, y_flat, y_offs, d_offs, l):
    w = np.empty(l)
    for j in range(l):
        yj = y_flat[y_offs[j] : y_offs[j + 1]]
        fj = f[d_offs[j] : d_offs[j + 1]]
        w[j] = np.exp(-np.sum((yj - fj) ** 2))
    return w


def els_residual(a, K, M, y_flat, y_offs, d_offs, l, gamma_A, gamma_I):
    """Residual of the published stationarity system for the
    exponential loss: identity on every block, weighted labeled-labeled
    coupling, linear manifold term, unweighted right-hand side."""
    a = np.asarray(a, dtype=float)
    f = K @ a
    H = a + (gamma_I / gamma_A) * (M @ f)
    w = _weights(f, y_flat, y_offs, d_offs, l)
    c = 1.0 / (l * gamma_A)
    for i in range(l):
        bi = slice(d_offs[i], d_offs[i + 1])
        s = np.zeros(d_offs[i + 1] - d_offs[i])
        for j in range(l):
            bj = slice(d_offs[j], d_offs[j + 1])
            s += w[j] * (K[bi, bj] @ a[bj])
        H[bi] += c * (s - y_flat[y_offs[i] : y_offs[i + 1]])
    return H


def els_jacobian_R(a, K, MK, y_flat, y_offs, d_offs, l, gamma_A, gamma_I):
    """Non-identity part R of the residual Jacobian (J = I + R/gamma_A):
    weighted labeled-labeled blocks, rank-one corrections from the
    weight derivatives, and the linear manifold term."""
    a = np.asarray(a, dtype=float)
    N = a.size
    f = K @ a
    w = _weights(f, y_flat, y_offs, d_offs, l)
    R = gamma_I * np.asarray(MK, dtype=float).copy()
    lab = d_offs[l]
    for j in range(l):
        bj = slice(d_offs[j], d_offs[j + 1])
        # direct weighted coupling on labeled rows
        R[:lab, bj] += (w[j] / l) * K[:lab, bj]
        # rank-one update from d w_j / d a
        t = np.zeros(N)
        t[:lab] = K[:lab, bj] @ a[bj]
        dj = f[bj] - y_flat[y_offs[j] : y_offs[j + 1]]
        s = (-2.0 * w[j] / l) * (K[:, bj] @ dj)
        R += np.outer(t, s)
    return R
