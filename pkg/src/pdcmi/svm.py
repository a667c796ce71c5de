"""Soft-margin RBF-kernel SVM trained by pairwise coordinate ascent.

The dual problem is solved by sequential minimal optimization with
maximal-violating-pair working-set selection to a KKT gap of 1e-3. The
cross-validation harness repeats stratified random splits and z-scores
features with training-fold statistics only, so no test information leaks
into the scaling.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ContractError
from .io import CLASS1, CLASS2
from .mvar import burg_fit, burg_psd

KKT_TOL = 1e-3
MAX_SMO_ITER = 200000


def rbf_kernel_matrix(x, y, gamma):
    """K[u, v] = exp(-gamma ||x_u - y_v||^2) via the inner-product expansion."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    sq = (np.sum(x * x, axis=1)[:, None] + np.sum(y * y, axis=1)[None, :]
          - 2.0 * x @ y.T)
    np.clip(sq, 0.0, None, out=sq)
    return np.exp(-gamma * sq)


@dataclass(frozen=True)
class SvmModel:
    """Support vectors with signed dual coefficients alpha_i y_i."""
    support_vectors: np.ndarray
    dual_coeffs: np.ndarray
    bias: float
    gamma: float
    c_penalty: float
    n_features: int


@dataclass(frozen=True)
class CvResult:
    mean_accuracy_pct: float
    std_accuracy_pct: float
    n_repeats: int
    per_repeat: tuple


def _check_training_input(features, labels):
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise ContractError("features must be [n x d] with n labels")
    if not np.all(np.isfinite(x)):
        raise ContractError("features must be finite")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ContractError("labels must be +-1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ContractError("training needs both classes")
    return x, y


def svm_train(features, labels, c_penalty, gamma):
    """Train on +-1 labels; returns the sparse dual model."""
    x, y = _check_training_input(features, labels)
    if c_penalty <= 0 or gamma <= 0:
        raise ContractError("c_penalty and gamma must be positive")
    kernel = rbf_kernel_matrix(x, x, gamma)
    qmat = kernel * np.outer(y, y)
    alpha, grad, _ = backend.smo_solve(qmat, y, float(c_penalty), KKT_TOL,
                                       MAX_SMO_ITER)
    yg = -y * grad
    up = ((y > 0) & (alpha < c_penalty)) | ((y < 0) & (alpha > 0))
    lo = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c_penalty))
    m_up = np.max(np.where(up, yg, -np.inf))
    m_lo = np.min(np.where(lo, yg, np.inf))
    bias = (m_up + m_lo) / 2.0 if np.isfinite(m_up + m_lo) else 0.0
    keep = alpha != 0.0
    return SvmModel(x[keep].copy(), (alpha * y)[keep], float(bias),
                    float(gamma), float(c_penalty), x.shape[1])


def svm_decision(model, features):
    """Decision values for a batch of feature vectors."""
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if x.shape[1] != model.n_features:
        raise ContractError("expected %d features, got %d"
                            % (model.n_features, x.shape[1]))
    kernel = rbf_kernel_matrix(model.support_vectors, x, model.gamma)
    return model.dual_coeffs @ kernel + model.bias


def svm_predict(model, feature):
    """(label, decision value) for one feature vector; ties go to +1."""
    decision = float(svm_decision(model, np.atleast_2d(feature))[0])
    return (1 if decision >= 0 else -1), decision


def build_feature_vectors(epoch_set, spec, burg_order):
    """Per-epoch AR spectra of the selected channel at the band grid.

    Returns raw (unscaled) features and +-1 labels (+1 for class 1);
    standardization happens inside cross_validate on training folds.
    """
    epoch_set.require_two_classes()
    if not spec.freqs_hz:
        raise ContractError("feature band contains no grid frequencies")
    rows = []
    labels = []
    for epoch in epoch_set.epochs:
        model = burg_fit(epoch.samples[spec.channel_index], burg_order)
        rows.append(burg_psd(model, spec.freqs_hz,
                             epoch_set.sample_rate_hz))
        labels.append(1.0 if epoch.class_label == CLASS1 else -1.0)
    return np.array(rows), np.array(labels)


def stratified_split(labels, split_fraction, rng):
    """Sorted train/test index arrays with both classes in each side."""
    train = []
    test = []
    for value in (1.0, -1.0):
        idx = np.flatnonzero(labels == value)
        if idx.size < 2:
            raise ContractError("each class needs at least 2 samples")
        perm = rng.permutation(idx)
        n_train = int(round(split_fraction * idx.size))
        n_train = min(max(n_train, 1), idx.size - 1)
        train.extend(perm[:n_train])
        test.extend(perm[n_train:])
    return np.array(sorted(train)), np.array(sorted(test))


def cross_validate(features, labels, c_penalty, gamma, n_repeats,
                   split_fraction, seed):
    """Repeated stratified random-split accuracy of the RBF SVM.

    Each repeat r draws its split from default_rng(seed + r), z-scores
    both folds with the training fold's mean and standard deviation
    (zero spread maps to 1), trains, and scores percent correct on the
    held-out fold. Reported std uses divisor n_repeats - 1.
    """
    x, y = _check_training_input(features, labels)
    if not (0 < split_fraction < 1):
        raise ContractError("split_fraction must be in (0, 1)")
    if n_repeats < 1:
        raise ContractError("n_repeats must be >= 1")
    accuracies = []
    for repeat in range(int(n_repeats)):
        rng = np.random.default_rng(seed + repeat)
        train, test = stratified_split(y, split_fraction, rng)
        mu = x[train].mean(axis=0)
        sd = x[train].std(axis=0)
        sd = np.where(sd == 0, 1.0, sd)
        x_train = (x[train] - mu) / sd
        x_test = (x[test] - mu) / sd
        model = svm_train(x_train, y[train], c_penalty, gamma)
        decision = svm_decision(model, x_test)
        predicted = np.where(decision >= 0, 1.0, -1.0)
        accuracies.append(100.0 * float(np.mean(predicted == y[test])))
    mean = float(np.mean(accuracies))
    std = float(np.std(accuracies, ddof=1)) if len(accuracies) > 1 else 0.0
    return CvResult(mean, std, int(n_repeats), tuple(accuracies))
