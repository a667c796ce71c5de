"""INI pipeline configuration with typed defaults and overrides.

Every key has a default; a config file and then repeated "--set
section.key=value" flags override them. The fully resolved configuration
is embedded in every report so a run can be reproduced from its output
alone.
"""

import configparser
from pathlib import Path

from .errors import ContractError, IoError


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % text)


def _pair(text):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ValueError("expected low,high")
    return (float(parts[0]), float(parts[1]))


# (default, converter) per key; converters raise ValueError on bad input.
_SCHEMA = {
    "input": {
        "signal": ("", str),
        "format": ("csv", str),
        "sample_rate": (1200.0, float),
        "epoch_seconds": (1.0, float),
    },
    "preprocess": {
        "enabled": (True, _bool),
        "bandpass_low": (5.0, float),
        "bandpass_high": (50.0, float),
        "bandpass_order": (4, int),
        "notch_center": (50.0, float),
        "notch_q": (35.0, float),
        "decimate": (1, int),
    },
    "grid": {
        "low": (8.0, float),
        "high": (30.0, float),
        "step": (1.0, float),
        "burg_order": (0, int),   # 0 selects per channel by reflection
        "burg_scan": (20, int),
        "reflection_threshold": (0.1, float),
        "aic_max": (20, int),
    },
    "bands": {
        "alpha": ((8.0, 12.0), _pair),
        "beta": ((13.0, 30.0), _pair),
    },
    "svm": {
        "c": (512.0, float),
        "gamma": (0.002, float),
        "repeats": (100, int),
        "split": (0.5, float),
    },
    "screen": {
        "alpha_level": (0.001, float),
    },
    "synth": {
        "preset": ("edge", str),
        "epochs_per_class": (30, int),
        "gain": (0.0, float),     # 0 keeps the preset's default gain
    },
    "output": {
        "dir": ("out", str),
        "seed": (0, int),
        "jobs": (1, int),
    },
}


def default_config():
    return {section: {key: spec[0] for key, spec in keys.items()}
            for section, keys in _SCHEMA.items()}


def _convert(section, key, raw):
    if section not in _SCHEMA:
        raise ContractError("unknown config section [%s]" % section)
    if key not in _SCHEMA[section]:
        raise ContractError("unknown config key %s.%s" % (section, key))
    try:
        return _SCHEMA[section][key][1](raw)
    except ValueError as exc:
        raise ContractError("bad value for %s.%s: %s" % (section, key, exc))


def load_config(path=None):
    """Defaults, overlaid with an INI file when one is given."""
    cfg = default_config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise IoError("cannot read config %s: %s" % (path, exc))
    except configparser.Error as exc:
        raise ContractError("config %s is not valid INI: %s" % (path, exc))
    for section in parser.sections():
        for key, raw in parser.items(section):
            cfg[section][key] = _convert(section, key, raw)
    return cfg


def apply_overrides(cfg, assignments):
    """Apply repeated "section.key=value" strings in order."""
    for text in assignments:
        if "=" not in text:
            raise ContractError("override %r is not key=value" % text)
        key_path, raw = text.split("=", 1)
        if "." not in key_path:
            raise ContractError("override key %r needs section.key"
                                % key_path)
        section, key = key_path.split(".", 1)
        cfg[section.strip()][key.strip()] = _convert(section.strip(),
                                                     key.strip(),
                                                     raw.strip())
    return cfg


def validate_config(cfg):
    """Cross-key invariants; raises ContractError with the failing key."""
    grid = cfg["grid"]
    if not grid["low"] < grid["high"]:
        raise ContractError("grid.low must be below grid.high")
    if grid["step"] <= 0:
        raise ContractError("grid.step must be positive")
    for name in ("alpha", "beta"):
        low, high = cfg["bands"][name]
        if low > high:
            raise ContractError("bands.%s is reversed" % name)
        if low < grid["low"] or high > grid["high"]:
            raise ContractError("bands.%s exceeds the grid range" % name)
    if cfg["svm"]["c"] <= 0 or cfg["svm"]["gamma"] <= 0:
        raise ContractError("svm.c and svm.gamma must be positive")
    if not (0 < cfg["svm"]["split"] < 1):
        raise ContractError("svm.split must be in (0, 1)")
    if cfg["svm"]["repeats"] < 1:
        raise ContractError("svm.repeats must be >= 1")
    if not (0 < cfg["screen"]["alpha_level"] <= 1):
        raise ContractError("screen.alpha_level must be in (0, 1]")
    if cfg["input"]["epoch_seconds"] <= 0:
        raise ContractError("input.epoch_seconds must be positive")
    if cfg["input"]["format"] not in ("csv", "binary"):
        raise ContractError("input.format must be csv or binary")
    if cfg["output"]["jobs"] < 1:
        raise ContractError("output.jobs must be >= 1")
    for key in ("burg_scan", "aic_max"):
        if grid[key] < 1:
            raise ContractError("grid.%s must be >= 1" % key)
    if grid["burg_order"] < 0:
        raise ContractError("grid.burg_order must be >= 0")
    if not (0 < grid["reflection_threshold"] < 1):
        raise ContractError("grid.reflection_threshold must be in (0, 1)")
    return cfg


def grid_frequencies(cfg):
    """The analysis grid as a list, endpoints inclusive."""
    grid = cfg["grid"]
    freqs = []
    f = grid["low"]
    while f <= grid["high"] + 1e-9:
        freqs.append(round(f, 9))
        f += grid["step"]
    return freqs


def config_for_report(cfg):
    """JSON-ready copy (tuples become lists)."""
    out = {}
    for section, keys in cfg.items():
        out[section] = {}
        for key, value in keys.items():
            if isinstance(value, tuple):
                value = list(value)
            if isinstance(value, Path):
                value = str(value)
            out[section][key] = value
    return out
