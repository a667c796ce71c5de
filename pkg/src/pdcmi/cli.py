"""Command line pipeline around the library.

Subcommands:
  synth          write a synthetic two-class dataset plus its ground truth
  power          spectral discriminability map and SVM cross-validation
  connectivity   directed-coupling screen and inflow/outflow maps
  all            synth, then both analysis tracks on the files it wrote

Configuration resolves from defaults, an optional INI file, then repeated
--set overrides; the resolved form is embedded in report.json so a run is
reproducible from its outputs. A failed run removes everything it wrote.
Exit codes: 0 success, 2 for input/output and file-format problems,
1 for any other pipeline error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import (apply_overrides, config_for_report, grid_frequencies,
                     load_config, validate_config)
from .connectivity import flow_map, pdc
from .errors import (ContractError, DegenerateSignalError, FormatError,
                     IoError, LengthError, ParseError, PdcmiError,
                     SingularityError)
from .io import (CLASS1, CLASS2, Recording, TrialMark, events_path_for,
                 load_recording, save_matrix, save_recording,
                 segment_epochs)
from .mvar import (fit_mvar, mvar_to_dict, select_order_aic,
                   select_order_reflection)
from .preprocess import PreprocessSettings, preprocess_recording
from .stats import rsquared_map, screen_edges, select_features
from .svg import svg_bars, svg_digraph, svg_heatmap
from .svm import build_feature_vectors, cross_validate
from .synth import edge_scenario, make_two_class_scenario, rhythm_scenario
from ._parallel import ordered_map

from .mvar import burg_fit, burg_psd


def _num(value):
    return format(float(value), ".12g")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="INI configuration file")
    common.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--jobs", type=int, metavar="N",
                        help="worker threads for per-epoch stages")
    common.add_argument("--seed", type=int, metavar="N",
                        help="seed for synthesis and cross-validation")
    common.add_argument("--out", metavar="DIR", help="output directory")
    parser = argparse.ArgumentParser(
        prog="pdcmi",
        description="Two-class EEG analysis: spectral discriminability "
                    "and directed-coupling maps.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common],
                   help="write a synthetic dataset with known ground truth")
    sub.add_parser("power", parents=[common],
                   help="discriminability map and classification accuracy")
    sub.add_parser("connectivity", parents=[common],
                   help="directed-coupling edges and flow maps")
    sub.add_parser("all", parents=[common],
                   help="synth followed by both analysis tracks")
    return parser


def _write_text(path, text, written):
    written.append(Path(path))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError("cannot write %s: %s" % (path, exc))


def _scenario_from_config(cfg):
    synth = cfg["synth"]
    kwargs = {"epochs_per_class": synth["epochs_per_class"],
              "seed": cfg["output"]["seed"]}
    if synth["gain"] > 0:
        kwargs["gain"] = synth["gain"]
    if synth["preset"] == "edge":
        return edge_scenario(**kwargs)
    if synth["preset"] == "rhythm":
        return rhythm_scenario(**kwargs)
    raise ContractError("unknown synth preset %r" % synth["preset"])


def _run_synth(cfg, out_dir, written):
    """Simulate, write signal + events + truth files; returns a summary."""
    scenario = _scenario_from_config(cfg)
    epoch_set, truths = make_two_class_scenario(scenario)
    n = epoch_set.epochs[0].samples.shape[1]
    samples = np.concatenate([e.samples for e in epoch_set.epochs], axis=1)
    marks = [TrialMark(k * n, (k + 1) * n, e.class_label)
             for k, e in enumerate(epoch_set.epochs)]
    rec = Recording(samples, scenario.sample_rate_hz,
                    epoch_set.channel_names, marks)
    signal_path = out_dir / "signals.csv"
    written.append(signal_path)
    written.append(events_path_for(signal_path))
    save_recording(signal_path, rec, fmt="csv")
    for label, truth in truths.items():
        payload = {
            "class": label,
            "model": mvar_to_dict(truth.model),
            "coupling_edges": [list(e) for e in truth.coupling_edges],
            "seed": scenario.seed,
            "sample_rate_hz": scenario.sample_rate_hz,
            "epoch_seconds": scenario.epoch_seconds,
            "epochs_per_class": scenario.epochs_per_class,
        }
        _write_text(out_dir / ("truth_class%d.json" % label),
                    json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    written)
    info = {
        "preset": cfg["synth"]["preset"],
        "signal": str(signal_path),
        "events": str(events_path_for(signal_path)),
        "n_channels": rec.n_channels,
        "sample_rate_hz": scenario.sample_rate_hz,
        "epoch_seconds": scenario.epoch_seconds,
        "epochs_per_class": scenario.epochs_per_class,
        "coupling_edges": {
            "class%d" % label: [list(e) for e in truth.coupling_edges]
            for label, truth in truths.items()},
    }
    return info, scenario


def _load_and_segment(cfg, stage):
    stage[0] = "input"
    path = cfg["input"]["signal"]
    if not path:
        raise ContractError(
            "input.signal is not set; point it at a file or run synth")
    rec = load_recording(path, fmt=cfg["input"]["format"],
                         sample_rate_hz=cfg["input"]["sample_rate"])
    if cfg["preprocess"]["enabled"]:
        stage[0] = "preprocess"
        pp = cfg["preprocess"]
        rec = preprocess_recording(rec, PreprocessSettings(
            bandpass_low_hz=pp["bandpass_low"],
            bandpass_high_hz=pp["bandpass_high"],
            bandpass_order=pp["bandpass_order"],
            notch_center_hz=pp["notch_center"],
            notch_q=pp["notch_q"],
            decimate_factor=pp["decimate"]))
    stage[0] = "epoching"
    epoch_set = segment_epochs(rec, cfg["input"]["epoch_seconds"])
    epoch_set.require_two_classes()
    return rec, epoch_set


def _power_track(cfg, rec, epoch_set, out_dir, written):
    """Burg spectra, r-squared map, feature band, CV accuracy."""
    grid = cfg["grid"]
    freqs = np.array(grid_frequencies(cfg))
    fs = epoch_set.sample_rate_hz
    m = len(epoch_set.channel_names)
    if grid["burg_order"] > 0:
        orders = [grid["burg_order"]] * m
    else:
        # Order selection needs the long continuous channels; per-epoch
        # reflection estimates are noise-limited.
        orders = [select_order_reflection(rec.samples[ch],
                                          grid["burg_scan"],
                                          grid["reflection_threshold"])
                  for ch in range(m)]

    def spectra_of(epoch):
        return np.stack([
            burg_psd(burg_fit(epoch.samples[ch], orders[ch]), freqs, fs)
            for ch in range(m)])

    jobs = cfg["output"]["jobs"]
    spectra = ordered_map(spectra_of, epoch_set.epochs, jobs)
    psd1 = np.stack([s for s, e in zip(spectra, epoch_set.epochs)
                     if e.class_label == CLASS1])
    psd2 = np.stack([s for s, e in zip(spectra, epoch_set.epochs)
                     if e.class_label == CLASS2])
    rmap = rsquared_map(psd1, psd2, freqs, epoch_set.channel_names)
    selected = select_features(rmap)
    features, labels = build_feature_vectors(
        epoch_set, selected, orders[selected.channel_index])
    svm = cfg["svm"]
    cv = cross_validate(features, labels, svm["c"], svm["gamma"],
                        svm["repeats"], svm["split"],
                        cfg["output"]["seed"])
    col_labels = ["%g" % f for f in freqs]
    written.append(out_dir / "rsq_map.csv")
    save_matrix(out_dir / "rsq_map.csv", rmap.values,
                list(epoch_set.channel_names), col_labels)
    _write_text(out_dir / "rsq_map.svg",
                svg_heatmap(rmap.values, list(epoch_set.channel_names),
                            col_labels, "Discriminability map (r^2)"),
                written)
    return {
        "grid_hz": [float(f) for f in freqs],
        "burg_orders": orders,
        "n_epochs": {"class1": int(psd1.shape[0]),
                     "class2": int(psd2.shape[0])},
        "selected": {
            "channel": selected.channel_name,
            "channel_index": selected.channel_index,
            "center_hz": selected.center_hz,
            "band_hz": [selected.band[0], selected.band[1]],
            "n_features": len(selected.freqs_hz),
        },
        "peak_rsq": float(rmap.values.max()),
        "accuracy_pct_mean": cv.mean_accuracy_pct,
        "accuracy_pct_std": cv.std_accuracy_pct,
        "n_repeats": cv.n_repeats,
    }


def _feasible_mvar_order(n_samples, n_channels, requested):
    """Largest order the per-epoch regression can support, capped."""
    feasible = (n_samples - 1) // (n_channels + 1)
    return min(int(requested), feasible)


def _connectivity_track(cfg, epoch_set, out_dir, written):
    """Per-epoch MVAR + coupling tensors, edge screen, flow maps."""
    freqs = grid_frequencies(cfg)
    fs = epoch_set.sample_rate_hz
    names = list(epoch_set.channel_names)
    m = len(names)
    n = epoch_set.epochs[0].samples.shape[1]
    aic_max = _feasible_mvar_order(n, m, cfg["grid"]["aic_max"])
    if aic_max < 1:
        raise LengthError(
            "epochs of %d samples cannot fit an order-1 model on %d "
            "channels" % (n, m))

    def tensor_of(epoch):
        try:
            p = select_order_aic(epoch.samples, aic_max)
            model = fit_mvar(epoch.samples, p)
            return pdc(model, freqs, fs, epoch_set.channel_names), p, None
        except (SingularityError, DegenerateSignalError) as exc:
            return None, None, str(exc)

    jobs = cfg["output"]["jobs"]
    fits = ordered_map(tensor_of, epoch_set.epochs, jobs)
    tensors = {CLASS1: [], CLASS2: []}
    orders = {CLASS1: [], CLASS2: []}
    excluded = {CLASS1: 0, CLASS2: 0}
    for epoch, (tensor, order, err) in zip(epoch_set.epochs, fits):
        if tensor is None:
            excluded[epoch.class_label] += 1
        else:
            tensors[epoch.class_label].append(tensor)
            orders[epoch.class_label].append(order)
    for label in (CLASS1, CLASS2):
        if len(tensors[label]) < 2:
            raise ContractError(
                "class %d kept %d epochs after fit failures, need 2"
                % (label, len(tensors[label])))
    alpha_level = cfg["screen"]["alpha_level"]
    report = {
        "grid_hz": [float(f) for f in freqs],
        "max_order": aic_max,
        "orders": {"class1": orders[CLASS1], "class2": orders[CLASS2]},
        "excluded_epochs": {"class1": excluded[CLASS1],
                            "class2": excluded[CLASS2]},
        "alpha_level": alpha_level,
        "expected_null_edges_per_band": alpha_level * m * (m - 1),
        "bands": {},
    }
    for band_name in ("alpha", "beta"):
        band = cfg["bands"][band_name]
        sig = screen_edges(tensors[CLASS1], tensors[CLASS2], band,
                           alpha_level)
        lines = ["from,to,band_low,band_high,p_value,predominant"]
        for edge in sig.edges:
            lines.append("%s,%s,%s,%s,%s,%d" % (
                names[edge.from_channel], names[edge.to_channel],
                _num(band[0]), _num(band[1]), _num(edge.p_value),
                edge.predominant_class))
        _write_text(out_dir / ("edges_%s.csv" % band_name),
                    "\r\n".join(lines) + "\r\n", written)
        _write_text(out_dir / ("edges_%s.svg" % band_name),
                    svg_digraph(sig.edges, names,
                                "Directed coupling (%s band)" % band_name),
                    written)
        flow_series = {}
        for label in (CLASS1, CLASS2):
            fm = flow_map(tensors[label], band, label)
            rows = ["channel,outflow,inflow"]
            for ch, name in enumerate(names):
                rows.append("%s,%s,%s" % (name, _num(fm.outflow[ch]),
                                          _num(fm.inflow[ch])))
            _write_text(out_dir / ("flows_%s_class%d.csv"
                                   % (band_name, label)),
                        "\r\n".join(rows) + "\r\n", written)
            flow_series["class %d outflow" % label] = list(fm.outflow)
            flow_series["class %d inflow" % label] = list(fm.inflow)
        _write_text(out_dir / ("flows_%s.svg" % band_name),
                    svg_bars(flow_series, names,
                             "Information flow (%s band)" % band_name),
                    written)
        report["bands"][band_name] = {
            "band_hz": [float(band[0]), float(band[1])],
            "n_edges": len(sig.edges),
            "edges": [{
                "from": names[e.from_channel],
                "to": names[e.to_channel],
                "p_value": e.p_value,
                "predominant_class": e.predominant_class,
            } for e in sig.edges],
        }
    return report


def main(argv=None):
    args = build_parser().parse_args(argv)
    written = []
    stage = ["configuration"]
    try:
        cfg = load_config(args.config)
        apply_overrides(cfg, args.overrides)
        if args.jobs is not None:
            cfg["output"]["jobs"] = args.jobs
        if args.seed is not None:
            cfg["output"]["seed"] = args.seed
        if args.out is not None:
            cfg["output"]["dir"] = args.out
        validate_config(cfg)
        out_dir = Path(cfg["output"]["dir"])
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError("cannot create %s: %s" % (out_dir, exc))
        report = {"command": args.command, "seed": cfg["output"]["seed"]}
        if args.command in ("synth", "all"):
            stage[0] = "synthesis"
            info, scenario = _run_synth(cfg, out_dir, written)
            report["synth"] = info
            print("synth: %s epochs of %d channels at %g Hz -> %s"
                  % (2 * scenario.epochs_per_class, info["n_channels"],
                     scenario.sample_rate_hz, info["signal"]))
            if args.command == "all":
                cfg["input"]["signal"] = info["signal"]
                cfg["input"]["format"] = "csv"
                cfg["input"]["sample_rate"] = scenario.sample_rate_hz
                cfg["input"]["epoch_seconds"] = scenario.epoch_seconds
        if args.command in ("power", "connectivity", "all"):
            rec, epoch_set = _load_and_segment(cfg, stage)
        if args.command in ("power", "all"):
            stage[0] = "power analysis"
            report["power"] = _power_track(cfg, rec, epoch_set, out_dir,
                                           written)
            sel = report["power"]["selected"]
            print("power: peak r^2 %.3f at %s, %g Hz; accuracy "
                  "%.2f +- %.2f %%"
                  % (report["power"]["peak_rsq"], sel["channel"],
                     sel["center_hz"],
                     report["power"]["accuracy_pct_mean"],
                     report["power"]["accuracy_pct_std"]))
        if args.command in ("connectivity", "all"):
            stage[0] = "connectivity analysis"
            report["connectivity"] = _connectivity_track(cfg, epoch_set,
                                                         out_dir, written)
            for band_name, entry in report["connectivity"]["bands"].items():
                print("connectivity[%s]: %d edge%s"
                      % (band_name, entry["n_edges"],
                         "" if entry["n_edges"] == 1 else "s"))
        stage[0] = "report"
        report["config"] = config_for_report(cfg)
        _write_text(out_dir / "report.json",
                    json.dumps(report, sort_keys=True, indent=2) + "\n",
                    written)
        print("report: %s" % (out_dir / "report.json"))
        return 0
    except (PdcmiError, OSError) as exc:
        for path in written:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass
        print("error in %s stage: %s" % (stage[0], exc), file=sys.stderr)
        if isinstance(exc, (IoError, FormatError, ParseError, OSError)):
            return 2
        return 1


if __name__ == "__main__":
    sys.exit(main())
