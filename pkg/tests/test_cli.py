import json

import numpy as np
import pytest

from pdcmi.cli import build_parser, main
from pdcmi.io import load_recording


def _run(*args):
    return main(list(args))


def test_parser_has_all_subcommands():
    parser = build_parser()
    for cmd in ("synth", "power", "connectivity", "all"):
        args = parser.parse_args([cmd, "--out", "x"])
        assert args.command == cmd
        assert args.out == "x"


def test_synth_writes_loadable_dataset(tmp_path):
    out = tmp_path / "o"
    code = _run("synth", "--out", str(out), "--seed", "3",
                "--set", "synth.epochs_per_class=2")
    assert code == 0
    rec = load_recording(out / "signals.csv", fmt="csv",
                         sample_rate_hz=240.0)
    assert rec.n_channels == 16
    assert rec.n_samples == 4 * 240
    assert len(rec.trial_marks) == 4
    truth = json.loads((out / "truth_class1.json").read_text())
    assert truth["class"] == 1
    assert truth["coupling_edges"] == [[4, 6]]
    assert truth["seed"] == 3
    truth2 = json.loads((out / "truth_class2.json").read_text())
    assert truth2["coupling_edges"] == []


def test_all_pipeline_and_reports(tmp_path):
    out = tmp_path / "demo"
    code = _run("all", "--out", str(out), "--seed", "0", "--jobs", "2",
                "--set", "preprocess.enabled=false",
                "--set", "synth.epochs_per_class=6",
                "--set", "grid.aic_max=2",
                "--set", "svm.repeats=3")
    assert code == 0
    for name in ("report.json", "rsq_map.csv", "rsq_map.svg",
                 "edges_alpha.csv", "edges_beta.csv", "edges_alpha.svg",
                 "edges_beta.svg", "flows_alpha_class1.csv",
                 "flows_alpha_class2.csv", "flows_beta_class1.csv",
                 "flows_beta_class2.csv", "flows_alpha.svg",
                 "flows_beta.svg", "signals.csv", "signals_events.csv"):
        assert (out / name).exists(), name
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 0
    assert report["config"]["svm"]["repeats"] == 3
    assert report["config"]["grid"]["aic_max"] == 2
    assert report["power"]["n_epochs"] == {"class1": 6, "class2": 6}
    assert set(report["connectivity"]["bands"]) == {"alpha", "beta"}
    assert report["connectivity"]["excluded_epochs"] == {"class1": 0,
                                                         "class2": 0}
    header = (out / "edges_beta.csv").read_text().splitlines()[0]
    assert header == "from,to,band_low,band_high,p_value,predominant"
    flows = (out / "flows_beta_class1.csv").read_text().splitlines()
    assert flows[0] == "channel,outflow,inflow"
    assert len(flows) == 17


def test_all_runs_are_byte_identical(tmp_path):
    out = tmp_path / "rep"
    args = ("all", "--out", str(out), "--seed", "5",
            "--set", "preprocess.enabled=false",
            "--set", "synth.epochs_per_class=4",
            "--set", "grid.aic_max=2",
            "--set", "svm.repeats=2")
    assert _run(*args) == 0
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    for p in out.iterdir():
        p.unlink()
    assert _run(*args) == 0
    second = {p.name: p.read_bytes() for p in out.iterdir()}
    assert first == second


def test_power_needs_an_input(tmp_path, capsys):
    code = _run("power", "--out", str(tmp_path / "o"))
    assert code == 1
    err = capsys.readouterr().err
    assert "input" in err
    assert list((tmp_path / "o").iterdir()) == []


def test_missing_signal_file_exits_2(tmp_path, capsys):
    code = _run("power", "--out", str(tmp_path / "o"),
                "--set", "input.signal=%s" % (tmp_path / "nope.csv"))
    assert code == 2
    assert "error in input stage" in capsys.readouterr().err


def test_malformed_signal_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2,3\n")
    code = _run("power", "--out", str(tmp_path / "o"),
                "--set", "input.signal=%s" % bad)
    assert code == 2


def test_unlabeled_input_fails_cleanly(tmp_path, capsys):
    rng = np.random.default_rng(0)
    sig = tmp_path / "sig.csv"
    rows = ["a,b"] + ["%f,%f" % tuple(v) for v in rng.standard_normal((30, 2))]
    sig.write_text("\n".join(rows) + "\n")
    out = tmp_path / "o"
    code = _run("power", "--out", str(out),
                "--set", "input.signal=%s" % sig,
                "--set", "input.sample_rate=10",
                "--set", "preprocess.enabled=false")
    assert code == 1
    assert "epoching" in capsys.readouterr().err
    assert list(out.iterdir()) == []


def test_bad_override_exits_1(tmp_path, capsys):
    code = _run("synth", "--out", str(tmp_path / "o"),
                "--set", "grid.step=zero")
    assert code == 1
    assert "configuration" in capsys.readouterr().err


def test_config_file_is_honored(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[synth]\nepochs_per_class = 2\n"
                   "[output]\nseed = 11\n")
    out = tmp_path / "o"
    assert _run("synth", "--config", str(ini), "--out", str(out)) == 0
    truth = json.loads((out / "truth_class1.json").read_text())
    assert truth["seed"] == 11
    assert truth["epochs_per_class"] == 2
