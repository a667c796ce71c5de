"""Filtering front end: zero-phase band-pass and notch, optional decimation.

Filters are applied forward-backward so the net phase response is zero and
directed-coherence phase relations are not distorted by group delay. The
band-pass is a Butterworth design; the notch is a single biquad.
"""

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import ContractError, DesignError, LengthError
from .io import Recording, TrialMark


@dataclass(frozen=True)
class IirFilter:
    """Transfer-function filter; a[0] is normalized to 1 on construction."""
    b: tuple
    a: tuple

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if a.size == 0 or a[0] == 0:
            raise ContractError("a[0] must be nonzero")
        b = b / a[0]
        a = a / a[0]
        if a.size > 1 and np.any(np.abs(np.roots(a)) >= 1.0):
            raise DesignError("filter has poles on or outside the unit "
                              "circle")
        object.__setattr__(self, "b", tuple(float(v) for v in b))
        object.__setattr__(self, "a", tuple(float(v) for v in a))

    def response_at(self, freq_hz, sample_rate_hz):
        """Complex frequency response H(e^{jw}) at one frequency."""
        w = 2.0 * np.pi * freq_hz / sample_rate_hz
        kb = np.exp(-1j * w * np.arange(len(self.b)))
        ka = np.exp(-1j * w * np.arange(len(self.a)))
        return complex(np.dot(self.b, kb) / np.dot(self.a, ka))


@dataclass(frozen=True)
class PreprocessSettings:
    bandpass_low_hz: float = 5.0
    bandpass_high_hz: float = 50.0
    bandpass_order: int = 4
    notch_center_hz: float = 50.0
    notch_q: float = 35.0
    decimate_factor: int = 1


def design_bandpass(low_hz, high_hz, sample_rate_hz, order):
    """Butterworth band-pass as a normalized (b, a) filter."""
    nyq = sample_rate_hz / 2.0
    if not (0 < low_hz < high_hz < nyq):
        raise DesignError(
            "band edges (%g, %g) must satisfy 0 < low < high < %g"
            % (low_hz, high_hz, nyq))
    if order < 1:
        raise DesignError("order must be >= 1")
    b, a = sps.butter(order, [low_hz, high_hz], btype="bandpass",
                      fs=sample_rate_hz)
    return IirFilter(tuple(b), tuple(a))


def design_notch(center_hz, sample_rate_hz, quality_q):
    """Biquad notch: unit gain away from center, null at center."""
    nyq = sample_rate_hz / 2.0
    if not (0 < center_hz < nyq):
        raise DesignError("notch center %g outside (0, %g)"
                          % (center_hz, nyq))
    if quality_q <= 0:
        raise DesignError("quality factor must be positive")
    b, a = sps.iirnotch(center_hz, quality_q, fs=sample_rate_hz)
    return IirFilter(tuple(b), tuple(a))


def filtfilt(filt, x):
    """Forward-backward filtering with odd-reflection edge padding."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ContractError("filtfilt expects a single channel")
    pad = 3 * max(len(filt.a), len(filt.b))
    if x.size <= pad:
        raise LengthError("signal length %d needs more than %d samples"
                          % (x.size, pad))
    return sps.filtfilt(filt.b, filt.a, x, padtype="odd", padlen=pad)


def preprocess_recording(rec, settings=PreprocessSettings()):
    """Band-pass, notch, then optional decimation, channel by channel.

    Decimation divides the sample rate by the integer factor and rescales
    trial marks conservatively (ceil on both edges of the half-open range)
    so no mark covers samples outside its original span.
    """
    bp = design_bandpass(settings.bandpass_low_hz, settings.bandpass_high_hz,
                         rec.sample_rate_hz, settings.bandpass_order)
    notch = design_notch(settings.notch_center_hz, rec.sample_rate_hz,
                         settings.notch_q)
    out = np.empty_like(rec.samples)
    for ch in range(rec.n_channels):
        out[ch] = filtfilt(notch, filtfilt(bp, rec.samples[ch]))
    rate = rec.sample_rate_hz
    marks = rec.trial_marks
    q = int(settings.decimate_factor)
    if q < 1:
        raise ContractError("decimate factor must be >= 1")
    if q > 1:
        out = np.array([sps.decimate(ch, q, zero_phase=True) for ch in out])
        rate = rate / q
        marks = [TrialMark(-(-m.start // q), -(-m.end // q), m.label)
                 for m in marks]
        marks = [m for m in marks if m.start < m.end]
    return Recording(out, rate, rec.channel_names, marks)
