"""Recording/epoch data model and every on-disk format.

Two signal formats are supported. The CSV form has a header row of channel
names followed by one row per sample instant (UTF-8, comma separator,
decimal point). The binary form is magic "PDCF", u32 little-endian channel
count, u32 sample count, f64 sample rate, then all samples as f64
little-endian in channel-major order.

Trial boundaries and class labels live in a sidecar file named
"<stem>_events.csv" next to the signal file, with header "start,end,label";
indices are 0-based sample positions, end exclusive, label 1 or 2. Without
a sidecar the whole file is one unlabeled trial.
"""

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (ContractError, EpochingError, FormatError, IoError,
                     ParseError)

CLASS1 = 1
CLASS2 = 2
UNLABELED = 0

# 10/20-system montage used as the default 16-channel layout.
DEFAULT_CHANNEL_NAMES = (
    "FC5", "FC1", "FC2", "FC6", "C3", "CZ", "C4", "CP5",
    "CP1", "CP2", "CP6", "P3", "PZ", "P4", "PO3", "PO4",
)

_BINARY_MAGIC = b"PDCF"


def _fmt(value):
    # 12 significant digits keeps CSV round-trips at float precision
    # while staying byte-deterministic.
    return format(float(value), ".12g")


@dataclass(frozen=True)
class TrialMark:
    """Half-open sample range [start, end) carrying one class label."""
    start: int
    end: int
    label: int


@dataclass(frozen=True)
class Recording:
    """Multichannel signal with sample rate, channel names, trial marks.

    samples is [channels x time]. Instances are immutable; operations
    return new recordings.
    """
    samples: np.ndarray
    sample_rate_hz: float
    channel_names: tuple
    trial_marks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ContractError("samples must be 2-D [channels x time]")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channel_names",
                           tuple(str(n) for n in self.channel_names))
        object.__setattr__(self, "trial_marks", tuple(self.trial_marks))
        if self.sample_rate_hz <= 0:
            raise ContractError("sample_rate_hz must be positive")
        if len(self.channel_names) != samples.shape[0]:
            raise ContractError(
                "%d channel names for %d channels"
                % (len(self.channel_names), samples.shape[0]))
        n = samples.shape[1]
        for mark in self.trial_marks:
            if not (0 <= mark.start < mark.end <= n):
                raise ContractError(
                    "trial mark [%d, %d) outside signal of length %d"
                    % (mark.start, mark.end, n))
            if mark.label not in (UNLABELED, CLASS1, CLASS2):
                raise ContractError("trial label must be 0, 1 or 2")

    @property
    def n_channels(self):
        return self.samples.shape[0]

    @property
    def n_samples(self):
        return self.samples.shape[1]


@dataclass(frozen=True)
class Epoch:
    """Fixed-length window of all channels with a single class label."""
    samples: np.ndarray
    class_label: int
    source_trial: int


@dataclass(frozen=True)
class EpochSet:
    epochs: tuple
    sample_rate_hz: float
    channel_names: tuple

    def __post_init__(self):
        object.__setattr__(self, "epochs", tuple(self.epochs))
        object.__setattr__(self, "channel_names",
                           tuple(self.channel_names))
        shapes = {e.samples.shape for e in self.epochs}
        if len(shapes) > 1:
            raise ContractError("epochs differ in shape: %s" % shapes)

    def by_class(self, label):
        return [e for e in self.epochs if e.class_label == label]

    def require_two_classes(self):
        # Two-class analyses call this before touching the data.
        if not self.by_class(CLASS1) or not self.by_class(CLASS2):
            raise ContractError("need at least one epoch of each class")


def events_path_for(signal_path):
    """Sidecar path rule: <stem>_events.csv next to the signal file."""
    p = Path(signal_path)
    return p.with_name(p.stem + "_events.csv")


def _load_events(path, n_samples):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError("cannot read events file %s: %s" % (path, exc))
    if not rows or [c.strip() for c in rows[0]] != ["start", "end", "label"]:
        raise FormatError("events file %s needs header start,end,label"
                          % path)
    marks = []
    for idx, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise FormatError("events file %s line %d: expected 3 fields"
                              % (path, idx))
        try:
            start, end, label = (int(v) for v in row)
        except ValueError:
            raise ParseError("events file %s line %d: non-integer field"
                             % (path, idx))
        if label not in (CLASS1, CLASS2):
            raise FormatError("events file %s line %d: label must be 1 or 2"
                              % (path, idx))
        if not (0 <= start < end <= n_samples):
            raise FormatError(
                "events file %s line %d: range [%d, %d) outside signal"
                % (path, idx, start, end))
        marks.append(TrialMark(start, end, label))
    return marks


def _load_csv_signal(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError("%s is empty" % path)
            names = [h.strip() for h in header]
            if not names or any(not n for n in names):
                raise FormatError("%s: blank channel name in header" % path)
            for name in names:
                # Numeric-looking headers mean the header row is missing.
                try:
                    float(name)
                except ValueError:
                    continue
                raise FormatError(
                    "%s: header looks like data (saw %r)" % (path, name))
            columns = [[] for _ in names]
            for row_no, row in enumerate(reader, start=2):
                if len(row) != len(names):
                    raise FormatError(
                        "%s line %d: %d columns, header has %d"
                        % (path, row_no, len(row), len(names)))
                for col_no, cell in enumerate(row):
                    try:
                        columns[col_no].append(float(cell))
                    except ValueError:
                        raise ParseError(
                            "%s line %d column %d: cannot parse %r"
                            % (path, row_no, col_no + 1, cell))
    except OSError as exc:
        raise IoError("cannot read %s: %s" % (path, exc))
    samples = np.array(columns, dtype=np.float64)
    if samples.size == 0:
        samples = samples.reshape(len(names), 0)
    return samples, names


def _load_binary_signal(path):
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoError("cannot read %s: %s" % (path, exc))
    head = struct.calcsize("<4sIId")
    if len(blob) < head:
        raise FormatError("%s: truncated header" % path)
    magic, n_ch, n_samp, rate = struct.unpack_from("<4sIId", blob)
    if magic != _BINARY_MAGIC:
        raise FormatError("%s: bad magic %r" % (path, magic))
    expected = head + 8 * n_ch * n_samp
    if len(blob) != expected:
        raise FormatError("%s: expected %d bytes, found %d"
                          % (path, expected, len(blob)))
    data = np.frombuffer(blob, dtype="<f8", offset=head)
    samples = data.reshape(n_ch, n_samp).astype(np.float64)
    names = ["ch%02d" % i for i in range(n_ch)]
    return samples, names, rate


def load_recording(path, fmt="csv", sample_rate_hz=None):
    """Read a signal file plus its events sidecar into a Recording.

    CSV files do not carry a sample rate, so sample_rate_hz is required
    for fmt="csv" and ignored for fmt="binary" (the header stores it).
    """
    if fmt == "csv":
        if sample_rate_hz is None:
            raise ContractError("CSV input needs sample_rate_hz")
        samples, names = _load_csv_signal(path)
        rate = float(sample_rate_hz)
    elif fmt == "binary":
        samples, names, rate = _load_binary_signal(path)
    else:
        raise ContractError("unknown format %r" % fmt)
    ev_path = events_path_for(path)
    if ev_path.exists():
        marks = _load_events(ev_path, samples.shape[1])
    elif samples.shape[1] > 0:
        marks = [TrialMark(0, samples.shape[1], UNLABELED)]
    else:
        marks = []
    return Recording(samples, rate, names, marks)


def save_recording(path, rec, fmt="csv"):
    """Write the signal file; labeled trial marks go to the sidecar."""
    path = Path(path)
    try:
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(rec.channel_names)
                for t in range(rec.n_samples):
                    writer.writerow([_fmt(v) for v in rec.samples[:, t]])
        elif fmt == "binary":
            with open(path, "wb") as fh:
                fh.write(struct.pack("<4sIId", _BINARY_MAGIC,
                                     rec.n_channels, rec.n_samples,
                                     float(rec.sample_rate_hz)))
                fh.write(np.ascontiguousarray(
                    rec.samples, dtype="<f8").tobytes())
        else:
            raise ContractError("unknown format %r" % fmt)
        labeled = [m for m in rec.trial_marks if m.label != UNLABELED]
        if labeled:
            with open(events_path_for(path), "w", newline="",
                      encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["start", "end", "label"])
                for m in labeled:
                    writer.writerow([m.start, m.end, m.label])
    except OSError as exc:
        raise IoError("cannot write %s: %s" % (path, exc))


def segment_epochs(rec, epoch_seconds):
    """Cut every labeled trial into non-overlapping fixed-length epochs.

    Each trial yields floor(trial_length / epoch_length) epochs carrying
    the trial's label; the trailing remainder is discarded (padding would
    bias AR spectra). Trials shorter than one epoch, and unlabeled trials,
    are errors.
    """
    if epoch_seconds <= 0:
        raise ContractError("epoch_seconds must be positive")
    length = int(round(epoch_seconds * rec.sample_rate_hz))
    if length < 1:
        raise ContractError("epoch length rounds to zero samples")
    epochs = []
    for trial_idx, mark in enumerate(rec.trial_marks):
        if mark.label == UNLABELED:
            raise EpochingError(
                "trial %d has no class label; provide an events file"
                % trial_idx)
        span = mark.end - mark.start
        if span < length:
            raise EpochingError(
                "trial %d has %d samples, epoch needs %d"
                % (trial_idx, span, length))
        for k in range(span // length):
            start = mark.start + k * length
            window = rec.samples[:, start:start + length].copy()
            epochs.append(Epoch(window, mark.label, trial_idx))
    return EpochSet(epochs, rec.sample_rate_hz, rec.channel_names)


def save_matrix(path, matrix, row_labels, col_labels):
    """Write a labeled matrix as CSV; values keep 12 significant digits."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ContractError("matrix must be 2-D")
    if len(row_labels) != matrix.shape[0]:
        raise ContractError("%d row labels for %d rows"
                            % (len(row_labels), matrix.shape[0]))
    if len(col_labels) != matrix.shape[1]:
        raise ContractError("%d column labels for %d columns"
                            % (len(col_labels), matrix.shape[1]))
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + [str(c) for c in col_labels])
            for label, row in zip(row_labels, matrix):
                writer.writerow([str(label)] + [_fmt(v) for v in row])
    except OSError as exc:
        raise IoError("cannot write %s: %s" % (path, exc))


def load_matrix(path):
    """Inverse of save_matrix: returns (matrix, row_labels, col_labels)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError("cannot read %s: %s" % (path, exc))
    if not rows:
        raise FormatError("%s is empty" % path)
    col_labels = rows[0][1:]
    row_labels = []
    values = []
    for idx, row in enumerate(rows[1:], start=2):
        if len(row) != len(col_labels) + 1:
            raise FormatError("%s line %d: ragged row" % (path, idx))
        row_labels.append(row[0])
        try:
            values.append([float(v) for v in row[1:]])
        except ValueError:
            raise ParseError("%s line %d: non-numeric cell" % (path, idx))
    matrix = np.array(values, dtype=np.float64)
    if matrix.size == 0:
        matrix = matrix.reshape(len(row_labels), len(col_labels))
    return matrix, row_labels, col_labels
