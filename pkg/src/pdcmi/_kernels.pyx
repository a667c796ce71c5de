# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics match pdcmi._kernels_py exactly."""

import numpy as np

cimport numpy as cnp

from .errors import DegenerateSignalError

cnp.import_array()

BACKEND = "compiled"


def mvar_simulate(coeffs, innovations, presamples):
    """Iterate x(n) = sum_k A_k x(n-k) + e(n) forward.

    coeffs : (p, M, M) lag matrices A_1..A_p.
    innovations : (n, M) noise sequence e(n), consumed in order.
    presamples : (p, M) initial state; presamples[k] holds x(-(k+1)).

    Returns the (n, M) generated sequence.
    """
    cdef double[:, :, ::1] a = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double[:, ::1] e = np.ascontiguousarray(innovations,
                                                 dtype=np.float64)
    cdef double[:, ::1] pre = np.ascontiguousarray(presamples,
                                                   dtype=np.float64)
    cdef Py_ssize_t p = a.shape[0]
    cdef Py_ssize_t m = a.shape[1]
    cdef Py_ssize_t n = e.shape[0]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] prev
    cdef Py_ssize_t t, k, i, j, src
    cdef double acc
    for t in range(n):
        for i in range(m):
            out[t, i] = e[t, i]
        for k in range(1, p + 1):
            if t - k >= 0:
                prev = out
                src = t - k
            else:
                prev = pre
                src = k - t - 1
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += a[k - 1, i, j] * prev[src, j]
                out[t, i] += acc
    return out_arr


def burg_recursion(x, order):
    """Burg lattice recursion on a single channel.

    Returns (reflection, poly, err_var): the reflection coefficients
    k_1..k_p, the error-filter polynomial c_1..c_p of
    A(z) = 1 + c_1 z^-1 + ... + c_p z^-p, and the final prediction-error
    variance. Predictor coefficients are -poly.
    """
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t p = order
    f_arr = np.array(xv, dtype=np.float64)
    b_arr = np.array(xv, dtype=np.float64)
    cdef double[::1] f = f_arr
    cdef double[::1] b = b_arr
    refl_arr = np.empty(p, dtype=np.float64)
    poly_arr = np.zeros(p, dtype=np.float64)
    tmp_arr = np.zeros(p, dtype=np.float64)
    cdef double[::1] refl = refl_arr
    cdef double[::1] poly = poly_arr
    cdef double[::1] tmp = tmp_arr
    cdef double energy = 0.0
    cdef double num, den, k, fi, bi
    cdef Py_ssize_t m, t, i
    for t in range(n):
        energy += xv[t] * xv[t]
    energy /= n
    if energy == 0.0:
        raise DegenerateSignalError("signal has zero energy")
    for m in range(1, p + 1):
        num = 0.0
        den = 0.0
        for t in range(m, n):
            fi = f[t]
            bi = b[t - 1]
            num += fi * bi
            den += fi * fi + bi * bi
        if den <= 0.0:
            raise DegenerateSignalError(
                "prediction error vanished at order %d" % m)
        k = -2.0 * num / den
        refl[m - 1] = k
        # poly update: c <- [c + k * reverse(c), k]
        for i in range(m - 1):
            tmp[i] = poly[i] + k * poly[m - 2 - i]
        tmp[m - 1] = k
        for i in range(m):
            poly[i] = tmp[i]
        for t in range(n - 1, m - 1, -1):
            fi = f[t]
            bi = b[t - 1]
            f[t] = fi + k * bi
            b[t] = bi + k * fi
        # descending t keeps the b[t-1] reads ahead of their rewrites
        energy *= (1.0 - k * k)
    return refl_arr, poly_arr, energy


def smo_solve(qmat, labels, c_penalty, tol, max_iter):
    """Maximal-violating-pair SMO on the dual soft-margin problem.

    qmat : (n, n) matrix Q_ij = y_i y_j K(x_i, x_j).
    labels : (n,) entries +-1.
    Returns (alpha, grad, n_iter) where grad = Q alpha - 1 at the solution.
    The gap m_up - m_lo <= tol defines convergence.
    """
    cdef double[:, ::1] q = np.ascontiguousarray(qmat, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(labels, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    alpha_arr = np.zeros(n, dtype=np.float64)
    grad_arr = -np.ones(n, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] grad = grad_arr
    cdef double cpen = c_penalty
    cdef double gap_tol = tol
    cdef long it = 0
    cdef long iter_cap = max_iter
    cdef Py_ssize_t i, j, t
    cdef double m_up, m_lo, yg, quad, step, cap_i, cap_j, dai, daj
    while it < iter_cap:
        i = -1
        j = -1
        m_up = -np.inf
        m_lo = np.inf
        for t in range(n):
            yg = -y[t] * grad[t]
            if (y[t] > 0 and alpha[t] < cpen) or (y[t] < 0 and alpha[t] > 0):
                if yg > m_up:
                    m_up = yg
                    i = t
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < cpen):
                if yg < m_lo:
                    m_lo = yg
                    j = t
        if i < 0 or j < 0 or m_up - m_lo <= gap_tol:
            break
        it += 1
        quad = q[i, i] + q[j, j] - 2.0 * y[i] * y[j] * q[i, j]
        if quad < 1e-12:
            quad = 1e-12
        step = (m_up - m_lo) / quad
        cap_i = (cpen - alpha[i]) if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else (cpen - alpha[j])
        if cap_i < step:
            step = cap_i
        if cap_j < step:
            step = cap_j
        dai = y[i] * step
        daj = -y[j] * step
        alpha[i] += dai
        alpha[j] += daj
        for t in range(n):
            grad[t] += q[t, i] * dai + q[t, j] * daj
    return alpha_arr, grad_arr, int(it)
