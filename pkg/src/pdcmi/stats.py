"""Class-contrast statistics: r-squared maps, rank-sum tests, edge screens.

The r-squared of a feature against the two-class split is the squared
point-biserial correlation, the proportion of total variance explained by
the class difference. Directed-coupling screening runs a two-sided
Wilcoxon rank-sum test per ordered channel pair on per-epoch band means.
"""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .connectivity import band_indices
from .errors import ContractError, FeatureSelectionWarning
from .io import CLASS1, CLASS2


def rsquared(samples_class1, samples_class2):
    """Squared point-biserial correlation between value and class.

    Uses the population convention for the pooled standard deviation
    (divisor n1 + n2). Returns 0 when the pooled spread is zero.
    """
    x = np.asarray(samples_class1, dtype=np.float64).ravel()
    y = np.asarray(samples_class2, dtype=np.float64).ravel()
    if x.size == 0 or y.size == 0:
        raise ContractError("both classes need at least one sample")
    pooled = np.concatenate([x, y])
    spread = pooled.std()
    if spread == 0:
        return 0.0
    r = (x.mean() - y.mean()) / spread
    r *= np.sqrt(x.size * y.size) / (x.size + y.size)
    return float(r * r)


@dataclass(frozen=True)
class RSquaredMap:
    """Per-channel, per-frequency discriminability in [0, 1]."""
    values: np.ndarray
    freqs_hz: tuple
    channel_names: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ContractError("map must be [channels x frequencies]")
        if v.shape != (len(self.channel_names), len(self.freqs_hz)):
            raise ContractError("labels do not match map shape")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "freqs_hz",
                           tuple(float(f) for f in self.freqs_hz))
        object.__setattr__(self, "channel_names",
                           tuple(self.channel_names))


@dataclass(frozen=True)
class FeatureSpec:
    """Selected channel and frequency band for classification features."""
    channel_index: int
    channel_name: str
    center_hz: float
    band: tuple
    freqs_hz: tuple


def rsquared_map(psd_class1, psd_class2, freqs_hz, channel_names):
    """r-squared per (channel, frequency) over per-epoch spectra.

    Inputs are [epochs x channels x frequencies] per class. Vectorized
    equivalent of calling rsquared cell by cell.
    """
    a = np.asarray(psd_class1, dtype=np.float64)
    b = np.asarray(psd_class2, dtype=np.float64)
    if a.ndim != 3 or b.ndim != 3 or a.shape[1:] != b.shape[1:]:
        raise ContractError("per-class spectra must match in M and F")
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise ContractError("need at least 2 epochs per class")
    pooled = np.concatenate([a, b], axis=0)
    spread = pooled.std(axis=0)
    diff = a.mean(axis=0) - b.mean(axis=0)
    scale = np.sqrt(a.shape[0] * b.shape[0]) / (a.shape[0] + b.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(spread == 0, 0.0, diff / np.where(spread == 0, 1.0,
                                                       spread) * scale)
    return RSquaredMap(r * r, tuple(freqs_hz), tuple(channel_names))


def select_features(rsq_map, halfwidth_hz=1.0):
    """Global argmax of the map plus a center +- halfwidth band.

    Ties break toward the lower channel index, then the lower frequency.
    A map with no contrast at all still returns its first cell, with a
    FeatureSelectionWarning.
    """
    values = rsq_map.values
    if values.size == 0:
        raise ContractError("empty map")
    if not values.any():
        warnings.warn("r-squared map has no contrast; selecting first cell",
                      FeatureSelectionWarning, stacklevel=2)
    flat = int(np.argmax(values))
    ch, fi = divmod(flat, values.shape[1])
    freqs = np.asarray(rsq_map.freqs_hz)
    center = float(freqs[fi])
    low = max(center - halfwidth_hz, float(freqs[0]))
    high = min(center + halfwidth_hz, float(freqs[-1]))
    in_band = tuple(float(f) for f in freqs[(freqs >= low) & (freqs <= high)])
    return FeatureSpec(ch, rsq_map.channel_names[ch], center, (low, high),
                       in_band)


def _midranks(values):
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sv = values[order]
    tie_sum = 0.0
    i = 0
    while i < sv.size:
        j = i
        while j + 1 < sv.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        t = j - i + 1
        tie_sum += t ** 3 - t
        i = j + 1
    return ranks, tie_sum


def _ranksum_exact(nx, ny, w):
    # Distribution of the rank sum of nx items among ranks 1..nx+ny:
    # dp[k][s] counts k-subsets with sum s.
    total = nx + ny
    max_sum = nx * total
    dp = np.zeros((nx + 1, max_sum + 1), dtype=np.float64)
    dp[0, 0] = 1.0
    for rank in range(1, total + 1):
        for k in range(min(rank, nx), 0, -1):
            dp[k, rank:] += dp[k - 1, :-rank or None]
    counts = dp[nx]
    n_total = counts.sum()
    w_int = int(round(w))
    p_low = counts[:w_int + 1].sum() / n_total
    p_high = counts[w_int:].sum() / n_total
    return min(1.0, 2.0 * min(p_low, p_high))


def ranksum(x, y, method="auto"):
    """Two-sided Wilcoxon rank-sum p-value.

    method "auto" enumerates the exact null distribution when
    n_x + n_y <= 20 and the pooled sample is tie-free, and otherwise uses
    the normal approximation with midranks, tie-corrected variance, and a
    0.5 continuity correction. "exact" and "normal" force the paths.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size == 0 or y.size == 0:
        raise ContractError("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    has_ties = np.unique(pooled).size < pooled.size
    if method not in ("auto", "exact", "normal"):
        raise ContractError("unknown method %r" % method)
    if method == "exact" and has_ties:
        raise ContractError("exact path requires tie-free samples")
    use_exact = method == "exact" or (
        method == "auto" and not has_ties and pooled.size <= 20)
    ranks, tie_sum = _midranks(pooled)
    w = float(ranks[:x.size].sum())
    if use_exact:
        return _ranksum_exact(x.size, y.size, w)
    n = float(pooled.size)
    mu = x.size * (n + 1) / 2.0
    var = x.size * y.size / 12.0 * ((n + 1) - tie_sum / (n * (n - 1)))
    if var <= 0:
        return 1.0
    z = max((abs(w - mu) - 0.5) / np.sqrt(var), 0.0)
    return float(min(1.0, 2.0 * norm.sf(z)))


@dataclass(frozen=True)
class Edge:
    """One screened direction from_channel -> to_channel."""
    from_channel: int
    to_channel: int
    band: tuple
    p_value: float
    predominant_class: int


@dataclass(frozen=True)
class EdgeSignificance:
    edges: tuple
    alpha_level: float


def screen_edges(pdc_class1, pdc_class2, band, alpha_level):
    """Rank-sum screen of every ordered channel pair within a band.

    The per-epoch observation for direction j -> i is the mean coupling
    magnitude over in-band grid frequencies. Directions with
    p < alpha_level are kept and labeled with the class whose per-epoch
    median is larger.
    """
    if not (0 < alpha_level <= 1):
        raise ContractError("alpha_level must be in (0, 1]")
    if len(pdc_class1) < 2 or len(pdc_class2) < 2:
        raise ContractError("need at least 2 epochs per class")
    grid = pdc_class1[0].freqs_hz
    for tensor in itertools.chain(pdc_class1, pdc_class2):
        if tensor.freqs_hz != grid:
            raise ContractError("tensors use different frequency grids")
    idx = band_indices(grid, band)
    v1 = np.stack([t.values[:, :, idx].mean(axis=2) for t in pdc_class1])
    v2 = np.stack([t.values[:, :, idx].mean(axis=2) for t in pdc_class2])
    m = v1.shape[1]
    band_t = (float(band[0]), float(band[1]))
    edges = []
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            p = ranksum(v1[:, i, j], v2[:, i, j])
            if p < alpha_level:
                med1 = float(np.median(v1[:, i, j]))
                med2 = float(np.median(v2[:, i, j]))
                winner = CLASS2 if med2 > med1 else CLASS1
                edges.append(Edge(j, i, band_t, p, winner))
    return EdgeSignificance(tuple(edges), float(alpha_level))
