"""Pure-Python reference kernels.

The compiled module `pdcmi._kernels` implements the same three functions
with identical semantics; `pdcmi.backend` picks whichever is available.
Keep the two in lockstep: the backend parity tests compare them item by
item on random inputs.
"""

import numpy as np

from .errors import DegenerateSignalError

BACKEND = "python"


def mvar_simulate(coeffs, innovations, presamples):
    """Iterate x(n) = sum_k A_k x(n-k) + e(n) forward.

    coeffs : (p, M, M) lag matrices A_1..A_p.
    innovations : (n, M) noise sequence e(n), consumed in order.
    presamples : (p, M) initial state; presamples[k] holds x(-(k+1)).

    Returns the (n, M) generated sequence.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    innovations = np.ascontiguousarray(innovations, dtype=np.float64)
    presamples = np.ascontiguousarray(presamples, dtype=np.float64)
    p = coeffs.shape[0]
    n = innovations.shape[0]
    out = np.empty_like(innovations)
    for t in range(n):
        acc = innovations[t].copy()
        for k in range(1, p + 1):
            prev = out[t - k] if t - k >= 0 else presamples[k - t - 1]
            acc += coeffs[k - 1] @ prev
        out[t] = acc
    return out


def burg_recursion(x, order):
    """Burg lattice recursion on a single channel.

    Returns (reflection, poly, err_var): the reflection coefficients
    k_1..k_p, the error-filter polynomial c_1..c_p of
    A(z) = 1 + c_1 z^-1 + ... + c_p z^-p, and the final prediction-error
    variance. Predictor coefficients are -poly.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    f = x.copy()
    b = x.copy()
    energy = float(np.dot(x, x)) / n
    if energy == 0.0:
        raise DegenerateSignalError("signal has zero energy")
    reflection = np.empty(order)
    poly = np.empty(0)
    for m in range(1, order + 1):
        fh = f[m:]
        bh = b[m - 1:n - 1]
        den = float(np.dot(fh, fh) + np.dot(bh, bh))
        if den <= 0.0:
            raise DegenerateSignalError(
                "prediction error vanished at order %d" % m)
        k = -2.0 * float(np.dot(fh, bh)) / den
        reflection[m - 1] = k
        poly = np.concatenate([poly + k * poly[::-1], [k]])
        fnew = fh + k * bh
        bnew = bh + k * fh
        f[m:] = fnew
        b[m:] = bnew
        energy *= (1.0 - k * k)
    return reflection, poly, energy


def smo_solve(qmat, labels, c_penalty, tol, max_iter):
    """Maximal-violating-pair SMO on the dual soft-margin problem.

    qmat : (n, n) matrix Q_ij = y_i y_j K(x_i, x_j).
    labels : (n,) entries +-1.
    Returns (alpha, grad, n_iter) where grad = Q alpha - 1 at the solution.
    The gap m_up - m_lo <= tol defines convergence.
    """
    qmat = np.ascontiguousarray(qmat, dtype=np.float64)
    y = np.ascontiguousarray(labels, dtype=np.float64)
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    pos = y > 0
    it = 0
    while it < max_iter:
        yg = -y * grad
        up = (pos & (alpha < c_penalty)) | (~pos & (alpha > 0))
        lo = (pos & (alpha > 0)) | (~pos & (alpha < c_penalty))
        yg_up = np.where(up, yg, -np.inf)
        yg_lo = np.where(lo, yg, np.inf)
        i = int(np.argmax(yg_up))
        j = int(np.argmin(yg_lo))
        m_up = yg_up[i]
        m_lo = yg_lo[j]
        if m_up - m_lo <= tol:
            break
        it += 1
        quad = qmat[i, i] + qmat[j, j] - 2.0 * y[i] * y[j] * qmat[i, j]
        if quad < 1e-12:
            quad = 1e-12
        step = (m_up - m_lo) / quad
        cap_i = (c_penalty - alpha[i]) if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else (c_penalty - alpha[j])
        step = min(step, cap_i, cap_j)
        dai = y[i] * step
        daj = -y[j] * step
        alpha[i] += dai
        alpha[j] += daj
        grad += qmat[:, i] * dai + qmat[:, j] * daj
    return alpha, grad, it
