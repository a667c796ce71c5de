"""End-to-end acceptance suite.

Each test exercises one numbered claim about the pipeline on synthetic
data with a known ground truth and records a PASS/FAIL line that the
conftest summary hook prints after the run.  Tolerances and runtime
bounds are part of the claims.
"""
import itertools
import json
import time

import numpy as np
import pytest
from scipy.signal import lfilter

from pdcmi import (CLASS1, CLASS2, GroundTruth, MvarModel, band_indices,
                   build_feature_vectors, burg_fit, burg_psd,
                   cross_validate, edge_scenario, fit_mvar, flow_map,
                   generate, make_two_class_scenario, pdc, ranksum,
                   rhythm_scenario, rsquared_map, screen_edges,
                   select_features, select_order_aic,
                   select_order_reflection, stable_random_model)
from pdcmi.cli import main as cli_main

GRID = np.arange(8.0, 31.0, 1.0)


def test_criterion_1_pdc_unit_column_mass(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(12345)
    worst = 0.0
    count = 0
    for m in (2, 4, 16):
        for p in range(1, 7):
            for _ in range(6 if m < 16 else 5):
                tensor = pdc(stable_random_model(m, p, rng), GRID, 240.0)
                colsum = np.sum(tensor.values ** 2, axis=0)
                worst = max(worst, float(np.abs(colsum - 1.0).max()))
                count += 1
    elapsed = time.perf_counter() - t0
    acceptance(1, "PDC columns carry unit quadratic mass on 100 random "
                  "stable models",
               count >= 100 and worst <= 1e-9 and elapsed < 10.0,
               "%d models, worst deviation %.2e, %.1f s"
               % (count, worst, elapsed))


def test_criterion_2_structural_zeros_and_fit_fidelity(acceptance):
    t0 = time.perf_counter()
    coeffs = np.array([[[0.5, 0.0], [0.4, 0.3]]])
    truth = MvarModel(coeffs, np.eye(2))
    true_tensor = pdc(truth, GRID, 240.0)
    non_edge = float(true_tensor.values[0, 1].max())
    samples = generate(GroundTruth.from_model(truth, 7), 50000,
                       burn_in=500, seed=7)
    fitted_tensor = pdc(fit_mvar(samples, 1), GRID, 240.0)
    sup = float(np.abs(fitted_tensor.values - true_tensor.values).max())
    elapsed = time.perf_counter() - t0
    acceptance(2, "non-edges are exactly zero and a 50000-sample refit "
                  "tracks the true PDC within 0.05",
               non_edge == 0.0 and sup < 0.05 and elapsed < 60.0,
               "non-edge max %.1e, sup-norm %.4f, %.1f s"
               % (non_edge, sup, elapsed))


def test_criterion_3_order_selection(acceptance):
    t0 = time.perf_counter()
    m = 4
    a1 = 0.30 * np.eye(m)
    a1[0, 1] = 0.15
    a1[2, 3] = -0.15
    a2 = -0.25 * np.eye(m)
    a3 = 0.30 * np.eye(m)
    a3[1, 0] = 0.10
    truth = GroundTruth.from_model(MvarModel(np.stack([a1, a2, a3]),
                                             np.eye(m)), 0)
    hits = 0
    for seed in range(100):
        samples = generate(truth, 5000, burn_in=300, seed=seed)
        hits += select_order_aic(samples, 10) == 3

    # AR(12) with reflection coefficients stepped well above the decay
    # threshold, realized through the Levinson recursion.
    k_true = np.array([-0.5, 0.3, -0.25, 0.2, -0.3, 0.25,
                       -0.2, 0.3, -0.25, 0.2, -0.3, 0.4])
    predictor = np.zeros(0)
    for k in k_true:
        if predictor.size:
            predictor = np.concatenate([predictor + k * predictor[::-1],
                                        [k]])
        else:
            predictor = np.array([k])
    orders = []
    for seed in range(5):
        noise = np.random.default_rng(100 + seed).standard_normal(42000)
        signal = lfilter([1.0], np.r_[1.0, predictor], noise)[2000:]
        orders.append(select_order_reflection(signal, 20, 0.1))
    elapsed = time.perf_counter() - t0
    acceptance(3, "AIC recovers MVAR(3) in >=95/100 seeds and the "
                  "reflection scan recovers AR(12)",
               hits >= 95 and all(p == 12 for p in orders)
               and elapsed < 120.0,
               "AIC %d/100, reflection orders %s, %.1f s"
               % (hits, orders, elapsed))


def test_criterion_4_burg_psd_peak_and_variance(acceptance):
    fs = 120.0
    rho = 0.95
    theta = 2.0 * np.pi * 10.0 / fs
    ar = np.array([2.0 * rho * np.cos(theta), -rho * rho])
    noise = np.random.default_rng(42).standard_normal(60000)
    signal = lfilter([1.0], np.r_[1.0, -ar], noise)[2000:]
    model = burg_fit(signal, 2)
    freqs = np.arange(0.0, fs / 2.0, 0.05)
    psd = burg_psd(model, freqs, fs)
    peak_hz = float(freqs[np.argmax(psd)])
    ratio = 2.0 * float(np.trapezoid(psd, freqs)) / float(signal.var())
    acceptance(4, "Burg PSD peaks at the planted 10 Hz resonance and "
                  "integrates to the signal variance",
               abs(peak_hz - 10.0) <= 0.5 and abs(ratio - 1.0) <= 0.10,
               "peak %.2f Hz, integral/variance %.4f" % (peak_hz, ratio))


def test_criterion_5_ranksum_exact_oracle(acceptance):
    checked = 0
    worst = 0.0
    for n in range(2, 13):
        all_ranks = list(range(1, n + 1))
        for nx in range(1, n):
            sums = np.array([sum(c) for c in
                             itertools.combinations(all_ranks, nx)],
                            dtype=float)
            total = float(sums.size)
            for combo in itertools.combinations(all_ranks, nx):
                x = list(combo)
                y = [r for r in all_ranks if r not in combo]
                w = float(sum(combo))
                p_low = float((sums <= w).sum()) / total
                p_high = float((sums >= w).sum()) / total
                expected = min(1.0, 2.0 * min(p_low, p_high))
                worst = max(worst, abs(ranksum(x, y) - expected))
                checked += 1
    p_example = ranksum([1, 2, 3], [4, 5, 6])
    acceptance(5, "rank-sum p-values match exhaustive enumeration for "
                  "all tie-free splits up to 12 samples",
               worst <= 1e-12 and p_example == 0.1,
               "%d splits, worst |dp| %.1e, p({1,2,3} vs {4,5,6}) = %r"
               % (checked, worst, p_example))


def test_criterion_6_edge_screening_end_to_end(acceptance):
    t0 = time.perf_counter()
    beta = (13.0, 30.0)
    hits = 0
    false_total = 0
    for seed in range(10):
        epoch_set, _ = make_two_class_scenario(edge_scenario(seed=seed))
        tensors = {CLASS1: [], CLASS2: []}
        for epoch in epoch_set.epochs:
            order = select_order_aic(epoch.samples, 6)
            model = fit_mvar(epoch.samples, order)
            tensors[epoch.class_label].append(
                pdc(model, GRID, epoch_set.sample_rate_hz,
                    epoch_set.channel_names))
        result = screen_edges(tensors[CLASS1], tensors[CLASS2], beta,
                              0.001)
        hits += any(e.from_channel == 4 and e.to_channel == 6
                    and e.predominant_class == CLASS1
                    for e in result.edges)
        false_total += sum(1 for e in result.edges
                           if (e.from_channel, e.to_channel) != (4, 6))
    elapsed = time.perf_counter() - t0
    acceptance(6, "the planted C3->C4 beta-band edge is screened out of "
                  "16-channel data in >=9/10 seeds with <=3 false edges",
               hits >= 9 and false_total <= 3 and elapsed < 300.0,
               "edge found %d/10, false edges %d, %.1f s"
               % (hits, false_total, elapsed))


def test_criterion_7_flow_map_consistency(acceptance):
    band = (8.0, 30.0)
    bound = float(len(band_indices(GRID, band)))
    rng = np.random.default_rng(99)
    worst_flow = 0.0
    for _ in range(10):
        tensors = [pdc(stable_random_model(5, 2, rng), GRID, 240.0)
                   for _ in range(9)]
        flows = flow_map(tensors, band, CLASS1)
        worst_flow = max(worst_flow, max(flows.outflow))
    diag = MvarModel(np.array([[[0.5, 0.0], [0.0, -0.3]]]), np.eye(2))
    diag_flows = flow_map([pdc(diag, GRID, 240.0)], band, CLASS1)
    largest = max(max(diag_flows.outflow), max(diag_flows.inflow))
    acceptance(7, "band outflow never exceeds the band's frequency count "
                  "and uncoupled channels carry zero flow",
               worst_flow <= bound + 1e-9 and largest == 0.0,
               "max outflow %.3f vs bound %g, diagonal-model flow %.1f"
               % (worst_flow, bound, largest))


@pytest.fixture(scope="module")
def rhythm_analysis():
    epoch_set, _ = make_two_class_scenario(rhythm_scenario(seed=0))
    grid = np.arange(8.0, 31.0, 2.0)
    fs = epoch_set.sample_rate_hz
    n_channels = len(epoch_set.channel_names)
    spectra = [np.stack([burg_psd(burg_fit(ep.samples[ch], 16), grid, fs)
                         for ch in range(n_channels)])
               for ep in epoch_set.epochs]
    psd1 = np.stack([s for s, ep in zip(spectra, epoch_set.epochs)
                     if ep.class_label == CLASS1])
    psd2 = np.stack([s for s, ep in zip(spectra, epoch_set.epochs)
                     if ep.class_label == CLASS2])
    rmap = rsquared_map(psd1, psd2, grid, epoch_set.channel_names)
    return epoch_set, grid, rmap, select_features(rmap)


def test_criterion_8_classification_track(acceptance, rhythm_analysis):
    epoch_set, _, _, spec = rhythm_analysis
    features, labels = build_feature_vectors(epoch_set, spec, 16)
    result = cross_validate(features, labels, 512.0, 0.002, 100, 0.5, 0)
    shuffled = np.random.default_rng(1).permutation(labels)
    null = cross_validate(features, shuffled, 512.0, 0.002, 100, 0.5, 0)
    acceptance(8, "RBF-SVM cross-validation beats 90% on the rhythm "
                  "scenario while shuffled labels stay at chance",
               result.mean_accuracy_pct > 90.0
               and abs(null.mean_accuracy_pct - 50.0) <= 6.0,
               "%.2f +/- %.2f %%, shuffled %.2f +/- %.2f %%"
               % (result.mean_accuracy_pct, result.std_accuracy_pct,
                  null.mean_accuracy_pct, null.std_accuracy_pct))


def test_criterion_9_rsquared_localization(acceptance, rhythm_analysis):
    _, grid, rmap, spec = rhythm_analysis
    channel, freq_idx = divmod(int(np.argmax(rmap.values)),
                               rmap.values.shape[1])
    peak_hz = float(grid[freq_idx])
    acceptance(9, "the r-squared map peaks at channel 13 / 24 Hz and "
                  "selects the 23-25 Hz band",
               channel == 13 and peak_hz == 24.0
               and spec.band == (23.0, 25.0),
               "argmax (%d, %g Hz), band %s, peak r^2 %.3f"
               % (channel, peak_hz, spec.band, float(rmap.values.max())))


def test_criterion_10_cli_determinism(acceptance, tmp_path):
    out = tmp_path / "run"
    argv = ["all", "--out", str(out), "--seed", "0",
            "--set", "preprocess.enabled=false",
            "--set", "synth.epochs_per_class=6",
            "--set", "grid.aic_max=2",
            "--set", "svm.repeats=5"]
    first_code = cli_main(list(argv))
    snapshot = {p.name: p.read_bytes() for p in out.iterdir()}
    second_code = cli_main(list(argv))
    repeat = {p.name: p.read_bytes() for p in out.iterdir()}
    identical = first_code == 0 and second_code == 0 and snapshot == repeat
    report = json.loads((out / "report.json").read_text())
    acceptance(10, "running the full pipeline twice with one seed "
                   "produces byte-identical reports",
               identical and report["seed"] == 0,
               "%d files compared" % len(snapshot))
