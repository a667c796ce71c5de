"""Multichannel AR estimation, order selection, and Burg spectra.

The multichannel model is x(n) = sum_{k=1..p} A_k x(n-k) + e(n) with M x M
coefficient matrices A_k and innovation covariance estimated from the
regression residuals. Single-channel spectra use the Burg lattice
recursion, whose reflection coefficients double as an order diagnostic.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import (ContractError, DegenerateSignalError, LengthError,
                     RangeError, SingularityError)


@dataclass(frozen=True)
class MvarModel:
    """Coefficient matrices A_1..A_p plus residual covariance."""
    coeff_matrices: np.ndarray
    noise_cov: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeff_matrices, dtype=np.float64)
        s = np.asarray(self.noise_cov, dtype=np.float64)
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise ContractError("coeff_matrices must be [p x M x M]")
        if a.shape[0] < 1:
            raise ContractError("model order must be >= 1")
        if s.shape != (a.shape[1], a.shape[1]):
            raise ContractError("noise_cov must be M x M")
        if not np.allclose(s, s.T, atol=1e-10):
            raise ContractError("noise_cov must be symmetric")
        object.__setattr__(self, "coeff_matrices", a)
        object.__setattr__(self, "noise_cov", s)

    @property
    def order_p(self):
        return self.coeff_matrices.shape[0]

    @property
    def n_channels(self):
        return self.coeff_matrices.shape[1]


@dataclass(frozen=True)
class BurgModel:
    """Single-channel AR model in predictor convention.

    ar_coeffs a_1..a_p satisfy x(n) = sum_k a_k x(n-k) + e(n);
    reflection_coeffs are the lattice coefficients k_1..k_p, each in
    [-1, 1]; noise_var is the final prediction-error variance.
    """
    ar_coeffs: tuple
    reflection_coeffs: tuple
    noise_var: float

    @property
    def order_p(self):
        return len(self.ar_coeffs)


def _as_samples(epoch):
    samples = getattr(epoch, "samples", epoch)
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[None, :]
    if samples.ndim != 2:
        raise ContractError("expected [channels x time] samples")
    return samples


def _lag_matrix(x, p, start):
    # Row n (for n = start..N-1) is [x(n-1); x(n-2); ...; x(n-p)].
    n = x.shape[1]
    return np.hstack([x[:, start - k:n - k].T for k in range(1, p + 1)])


def fit_mvar(epoch, order_p):
    """Least-squares fit of the order-p multichannel AR model.

    Regresses x(n) on the p stacked lags over n = p..N-1. The residual
    covariance uses divisor max(1, rows - M p), the regression's degrees
    of freedom.
    """
    x = _as_samples(epoch)
    m, n = x.shape
    p = int(order_p)
    if p < 1:
        raise ContractError("order_p must be >= 1")
    if n <= m * p + p:
        raise LengthError(
            "epoch of %d samples cannot support order %d with %d channels"
            % (n, p, m))
    if np.any(np.ptp(x, axis=1) == 0):
        ch = int(np.flatnonzero(np.ptp(x, axis=1) == 0)[0])
        raise SingularityError("channel %d is constant" % ch)
    design = _lag_matrix(x, p, p)
    target = x[:, p:].T
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < m * p:
        raise SingularityError(
            "regressor matrix has rank %d, needs %d" % (rank, m * p))
    resid = target - design @ coef
    div = max(1, (n - p) - m * p)
    noise_cov = resid.T @ resid / div
    noise_cov = (noise_cov + noise_cov.T) / 2.0
    coeffs = coef.T.reshape(m, p, m).transpose(1, 0, 2)
    return MvarModel(coeffs, noise_cov)


def select_order_aic(epoch, max_order):
    """Argmin over p of N_eff ln det(Sigma_p) + 2 M^2 p.

    Every candidate order is scored on the common sample span
    n = max_order..N-1 (N_eff rows), otherwise the orders see different
    data and the argmin is biased. Ties break toward smaller p.
    """
    x = _as_samples(epoch)
    m, n = x.shape
    pmax = int(max_order)
    if pmax < 1:
        raise ContractError("max_order must be >= 1")
    if n <= m * pmax + pmax:
        raise LengthError(
            "%d samples cannot score orders up to %d with %d channels"
            % (n, pmax, m))
    if np.any(np.ptp(x, axis=1) == 0):
        ch = int(np.flatnonzero(np.ptp(x, axis=1) == 0)[0])
        raise SingularityError("channel %d is constant" % ch)
    design = _lag_matrix(x, pmax, pmax)
    target = x[:, pmax:].T
    n_eff = n - pmax
    # One thin QR serves every order: Householder QR makes the first M p
    # columns of Q span the first M p columns of the design matrix.
    q, r = np.linalg.qr(design)
    if np.any(np.abs(np.diag(r)) < 1e-10 * max(1.0, np.abs(r[0, 0]))):
        raise SingularityError("regressor matrix is rank deficient")
    qty = q.T @ target
    yty = target.T @ target
    best_aic = np.inf
    best_p = 1
    for p in range(1, pmax + 1):
        head = qty[:m * p]
        resid_gram = yty - head.T @ head
        div = max(1, n_eff - m * p)
        sign, logdet = np.linalg.slogdet(resid_gram / div)
        aic = n_eff * logdet + 2.0 * m * m * p if sign > 0 else np.inf
        if aic < best_aic:
            best_aic = aic
            best_p = p
    return best_p


def burg_fit(signal, order_p):
    """Burg lattice fit of a single channel at a fixed order."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    p = int(order_p)
    if p < 1:
        raise ContractError("order_p must be >= 1")
    if x.size <= 2 * p:
        raise LengthError("signal of %d samples needs more than %d"
                          % (x.size, 2 * p))
    if np.ptp(x) == 0:
        raise DegenerateSignalError("signal is constant")
    reflection, poly, err_var = backend.burg_recursion(x, p)
    return BurgModel(tuple(-poly), tuple(reflection), float(err_var))


def select_order_reflection(signal, scan_order=20, decay_threshold=0.1):
    """Largest lattice stage whose reflection coefficient is still large.

    Fits at scan_order and returns the largest m with
    |k_m| >= decay_threshold, or 1 when all stages already decayed. The
    statistic is only meaningful when the signal is long enough that
    noise-level |k| (about 1/sqrt(N)) sits well below the threshold.
    """
    if scan_order < 2:
        raise ContractError("scan_order must be >= 2")
    if not (0 < decay_threshold < 1):
        raise ContractError("decay_threshold must be in (0, 1)")
    model = burg_fit(signal, scan_order)
    ks = np.abs(np.asarray(model.reflection_coeffs))
    alive = np.flatnonzero(ks >= decay_threshold)
    return int(alive[-1]) + 1 if alive.size else 1


def burg_psd(model, freqs_hz, sample_rate_hz):
    """AR power spectral density on an arbitrary frequency grid.

    PSD(f) = noise_var / (fs |1 - sum_k a_k e^{-2 pi i f k / fs}|^2),
    the two-sided density; its integral over (-Nyquist, Nyquist] is the
    process variance.
    """
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    if np.any(freqs >= sample_rate_hz / 2.0) or np.any(freqs < 0):
        raise RangeError("frequencies must lie in [0, Nyquist)")
    a = np.asarray(model.ar_coeffs, dtype=np.float64)
    k = np.arange(1, a.size + 1)
    phases = np.exp(-2j * np.pi * np.outer(freqs, k) / sample_rate_hz)
    denom = np.abs(1.0 - phases @ a) ** 2
    return model.noise_var / (sample_rate_hz * denom)


def mvar_to_dict(model):
    """JSON-ready form: {"p", "A", "noise_cov", "channels"}."""
    return {
        "p": model.order_p,
        "A": model.coeff_matrices.tolist(),
        "noise_cov": model.noise_cov.tolist(),
        "channels": model.n_channels,
    }


def mvar_from_dict(payload):
    model = MvarModel(np.asarray(payload["A"], dtype=np.float64),
                      np.asarray(payload["noise_cov"], dtype=np.float64))
    if model.n_channels != payload.get("channels", model.n_channels):
        raise ContractError("channel count mismatch in serialized model")
    if model.order_p != payload.get("p", model.order_p):
        raise ContractError("order mismatch in serialized model")
    return model
