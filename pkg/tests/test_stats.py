import itertools
import math

import numpy as np
import pytest

from pdcmi.connectivity import PdcTensor
from pdcmi.errors import ContractError, FeatureSelectionWarning
from pdcmi.io import CLASS1, CLASS2
from pdcmi.stats import (RSquaredMap, ranksum, rsquared, rsquared_map,
                         screen_edges, select_features)


def test_rsquared_equals_squared_pearson_with_dummy_label():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n1 = int(rng.integers(2, 12))
        n2 = int(rng.integers(2, 12))
        x = rng.standard_normal(n1)
        y = rng.standard_normal(n2) + rng.uniform(-1, 1)
        values = np.concatenate([x, y])
        dummy = np.concatenate([np.ones(n1), np.zeros(n2)])
        expected = np.corrcoef(values, dummy)[0, 1] ** 2
        assert rsquared(x, y) == pytest.approx(expected, abs=1e-12)


def test_rsquared_edge_cases():
    assert rsquared([1.0, 1.0], [1.0, 1.0]) == 0.0
    assert rsquared([1.0, 1.0], [2.0, 2.0]) == pytest.approx(1.0)
    with pytest.raises(ContractError):
        rsquared([], [1.0])


def test_map_matches_cellwise_loop():
    rng = np.random.default_rng(32)
    a = rng.standard_normal((5, 3, 4))
    b = rng.standard_normal((6, 3, 4)) + 0.5
    freqs = [8.0, 9.0, 10.0, 11.0]
    names = ["x", "y", "z"]
    rmap = rsquared_map(a, b, freqs, names)
    for ch in range(3):
        for fi in range(4):
            assert rmap.values[ch, fi] == pytest.approx(
                rsquared(a[:, ch, fi], b[:, ch, fi]), abs=1e-12)
    with pytest.raises(ContractError):
        rsquared_map(a[:1], b, freqs, names)


def test_select_features_band_and_ties():
    freqs = tuple(float(f) for f in range(8, 31))
    values = np.zeros((4, len(freqs)))
    values[2, 5] = 0.7   # 13 Hz
    spec = select_features(RSquaredMap(values, freqs, "abcd"))
    assert spec.channel_index == 2
    assert spec.center_hz == 13.0
    assert spec.band == (12.0, 14.0)
    assert spec.freqs_hz == (12.0, 13.0, 14.0)
    # tie goes to the lower channel, then the lower frequency
    values[1, 9] = 0.7
    spec = select_features(RSquaredMap(values, freqs, "abcd"))
    assert (spec.channel_index, spec.center_hz) == (1, 17.0)
    values[1, 7] = 0.7
    spec = select_features(RSquaredMap(values, freqs, "abcd"))
    assert (spec.channel_index, spec.center_hz) == (1, 15.0)


def test_select_features_clips_at_grid_edges():
    freqs = tuple(float(f) for f in range(8, 31))
    values = np.zeros((2, len(freqs)))
    values[0, 0] = 0.5   # 8 Hz: band cannot extend below the grid
    spec = select_features(RSquaredMap(values, freqs, "ab"))
    assert spec.band == (8.0, 9.0)
    assert spec.freqs_hz == (8.0, 9.0)


def test_select_features_warns_on_flat_map():
    freqs = (8.0, 9.0)
    with pytest.warns(FeatureSelectionWarning):
        spec = select_features(RSquaredMap(np.zeros((2, 2)), freqs, "ab"))
    assert spec.channel_index == 0


def _exact_p_by_enumeration(x, y):
    """Two-sided p from the full permutation null of the rank sum."""
    pooled = np.concatenate([x, y])
    ranks = np.argsort(np.argsort(pooled)) + 1.0
    nx = len(x)
    w_obs = ranks[:nx].sum()
    sums = [sum(c) for c in itertools.combinations(ranks, nx)]
    total = len(sums)
    p_low = sum(1 for s in sums if s <= w_obs) / total
    p_high = sum(1 for s in sums if s >= w_obs) / total
    return min(1.0, 2.0 * min(p_low, p_high))


def test_exact_path_matches_enumeration_exhaustively():
    """Every tie-free arrangement with n_x + n_y <= 12 ranks."""
    for nx in range(1, 6):
        for ny in range(nx, 7):
            n = nx + ny
            if n > 12:
                continue
            base = np.arange(1.0, n + 1.0)
            for chosen in itertools.combinations(range(n), nx):
                x = base[list(chosen)]
                y = np.delete(base, list(chosen))
                got = ranksum(x, y, method="exact")
                want = _exact_p_by_enumeration(x, y)
                assert got == pytest.approx(want, abs=1e-12), (x, y)


def test_fully_separated_six_values():
    assert ranksum([1, 2, 3], [4, 5, 6]) == pytest.approx(0.1, abs=1e-15)
    assert ranksum([4, 5, 6], [1, 2, 3]) == pytest.approx(0.1, abs=1e-15)


def test_auto_switches_to_normal_on_ties_or_size():
    x = [1.0, 2.0, 2.0, 3.0]
    y = [2.0, 4.0, 5.0, 6.0]
    p_auto = ranksum(x, y)
    p_normal = ranksum(x, y, method="normal")
    assert p_auto == p_normal
    with pytest.raises(ContractError):
        ranksum(x, y, method="exact")
    big_x = list(range(12))
    big_y = list(range(5, 17))
    assert ranksum(big_x, big_y) == ranksum(big_x, big_y,
                                            method="normal")


def test_normal_path_matches_textbook_formula():
    from scipy.stats import norm as normal_dist
    from scipy.stats import rankdata
    rng = np.random.default_rng(33)
    for _ in range(10):
        x = np.round(rng.standard_normal(15), 1)
        y = np.round(rng.standard_normal(18) + 0.3, 1)
        pooled = np.concatenate([x, y])
        ranks = rankdata(pooled)
        w = ranks[:x.size].sum()
        n = pooled.size
        _, counts = np.unique(pooled, return_counts=True)
        tie = float(np.sum(counts ** 3 - counts))
        mu = x.size * (n + 1) / 2.0
        var = x.size * y.size / 12.0 * ((n + 1) - tie / (n * (n - 1)))
        z = max((abs(w - mu) - 0.5) / math.sqrt(var), 0.0)
        want = min(1.0, 2.0 * normal_dist.sf(z))
        assert ranksum(x, y) == pytest.approx(want, abs=1e-12)


def test_ranksum_input_checks():
    with pytest.raises(ContractError):
        ranksum([], [1.0])
    with pytest.raises(ContractError):
        ranksum([1.0], [2.0], method="bogus")
    assert ranksum([1.0, 1.0], [1.0, 1.0]) == 1.0


def _tensor_from(values, freqs):
    names = ["ch%d" % i for i in range(values.shape[0])]
    return PdcTensor(values, freqs, names)


def _make_tensors(rng, n_epochs, m, freqs, boost=None):
    out = []
    for _ in range(n_epochs):
        vals = rng.uniform(0.1, 0.3, size=(m, m, len(freqs)))
        if boost is not None:
            i, j, delta = boost
            vals[i, j] += delta
        out.append(_tensor_from(vals, freqs))
    return out


def test_screen_edges_finds_planted_difference():
    rng = np.random.default_rng(34)
    freqs = [float(f) for f in range(8, 31)]
    t1 = _make_tensors(rng, 30, 3, freqs, boost=(2, 0, 0.5))
    t2 = _make_tensors(rng, 30, 3, freqs)
    sig = screen_edges(t1, t2, (13.0, 30.0), 0.001)
    found = {(e.from_channel, e.to_channel): e for e in sig.edges}
    assert (0, 2) in found
    assert found[(0, 2)].predominant_class == CLASS1
    assert found[(0, 2)].p_value < 0.001
    # the planted direction dominates; at this alpha the others are rare
    assert len(sig.edges) <= 2


def test_screen_edges_matches_per_pair_recomputation():
    # Oracle: the per-epoch observation for j -> i is the in-band mean of
    # the tensor cell; edges are the ordered pairs with p strictly below
    # alpha, labeled by the larger per-class median.
    rng = np.random.default_rng(35)
    freqs = [8.0, 9.0, 10.0]
    t1 = _make_tensors(rng, 3, 4, freqs)
    t2 = _make_tensors(rng, 3, 4, freqs)
    sig = screen_edges(t1, t2, (8.0, 10.0), 1.0)
    expected = {}
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            x = [t.values[i, j].mean() for t in t1]
            y = [t.values[i, j].mean() for t in t2]
            p = ranksum(x, y)
            if p < 1.0:
                winner = CLASS2 if np.median(y) > np.median(x) else CLASS1
                expected[(j, i)] = (p, winner)
    got = {(e.from_channel, e.to_channel): (e.p_value, e.predominant_class)
           for e in sig.edges}
    assert got == expected
    assert 0 < len(sig.edges) < 12  # pairs at p = 1.0 are excluded
    with pytest.raises(ContractError):
        screen_edges(t1, t2, (8.0, 10.0), 0.0)
    with pytest.raises(ContractError):
        screen_edges(t1[:1], t2, (8.0, 10.0), 0.5)


def test_screen_edges_winner_class2():
    rng = np.random.default_rng(36)
    freqs = [8.0, 9.0, 10.0]
    t1 = _make_tensors(rng, 20, 2, freqs)
    t2 = _make_tensors(rng, 20, 2, freqs, boost=(0, 1, 0.4))
    sig = screen_edges(t1, t2, (8.0, 10.0), 0.001)
    winners = {(e.from_channel, e.to_channel): e.predominant_class
               for e in sig.edges}
    assert winners.get((1, 0)) == CLASS2
