"""Frequency-domain directed-coupling measures for multichannel AR models.

For a fitted model with lag matrices A_k, the transfer structure at
frequency f is Abar(f) = I - sum_k A_k e^{-2 pi i (f/fs) k}. The directed-
coherence magnitude from channel j to channel i normalizes |Abar_ij(f)| by
the Hermitian norm of column j, so each source column carries unit
quadratic mass at every frequency. Band summaries and inflow/outflow maps
reduce per-epoch tensors with medians before aggregation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericalError, RangeError


@dataclass(frozen=True)
class PdcTensor:
    """Magnitudes values[i, j, f] = |pi_{i<-j}(f)| on a frequency grid."""
    values: np.ndarray
    freqs_hz: tuple
    channel_names: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.shape[0] != v.shape[1]:
            raise ContractError("values must be [M x M x F]")
        if v.shape[2] != len(self.freqs_hz):
            raise ContractError("frequency axis does not match grid")
        if len(self.channel_names) != v.shape[0]:
            raise ContractError("channel names do not match M")
        if v.min() < -1e-12 or v.max() > 1.0 + 1e-9:
            raise ContractError("magnitudes must lie in [0, 1]")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "freqs_hz",
                           tuple(float(f) for f in self.freqs_hz))
        object.__setattr__(self, "channel_names",
                           tuple(self.channel_names))


@dataclass(frozen=True)
class FlowMap:
    """Per-channel band-summed squared coupling, diagonal excluded."""
    outflow: tuple
    inflow: tuple
    band: tuple
    class_label: int


def transfer_matrix(model, f_hz, sample_rate_hz):
    """Abar(f) = I - sum_k A_k e^{-2 pi i (f/fs) k} at one frequency."""
    if f_hz >= sample_rate_hz / 2.0:
        raise RangeError("frequency %g at or above Nyquist" % f_hz)
    a = model.coeff_matrices
    k = np.arange(1, model.order_p + 1)
    z = np.exp(-2j * np.pi * (f_hz / sample_rate_hz) * k)
    return np.eye(model.n_channels, dtype=complex) - np.einsum(
        "kij,k->ij", a.astype(complex), z)


def pdc(model, freqs_hz, sample_rate_hz, channel_names=None):
    """Directed-coherence magnitudes on a frequency grid.

    Column j of the result at each frequency is Abar's column j scaled to
    unit Hermitian norm, so sum_i values[i, j, f]^2 = 1.
    """
    freqs = np.asarray(freqs_hz, dtype=np.float64)
    if freqs.size == 0:
        raise ContractError("frequency grid is empty")
    if np.any(np.diff(freqs) <= 0):
        raise ContractError("frequency grid must be strictly increasing")
    if freqs[-1] >= sample_rate_hz / 2.0 or freqs[0] < 0:
        raise RangeError("grid must lie in [0, Nyquist)")
    m = model.n_channels
    if channel_names is None:
        channel_names = tuple("ch%02d" % i for i in range(m))
    k = np.arange(1, model.order_p + 1)
    z = np.exp(-2j * np.pi * np.outer(k, freqs) / sample_rate_hz)
    abar = np.eye(m, dtype=complex)[:, :, None] - np.einsum(
        "kij,kf->ijf", model.coeff_matrices.astype(complex), z)
    col_norm = np.sqrt(np.sum(np.abs(abar) ** 2, axis=0))
    if np.any(col_norm < 1e-150):
        raise NumericalError("transfer-structure column underflowed")
    values = np.abs(abar) / col_norm[None, :, :]
    return PdcTensor(values, tuple(freqs), channel_names)


def band_indices(freqs_hz, band):
    """Grid indices falling inside the closed band (low, high)."""
    low, high = band
    if low > high:
        raise ContractError("band low %g above high %g" % (low, high))
    freqs = np.asarray(freqs_hz, dtype=np.float64)
    idx = np.flatnonzero((freqs >= low) & (freqs <= high))
    if idx.size == 0:
        raise RangeError("band [%g, %g] misses the frequency grid"
                         % (low, high))
    return idx


def _stack(per_epoch):
    if not per_epoch:
        raise ContractError("need at least one tensor")
    first = per_epoch[0]
    for t in per_epoch[1:]:
        if t.freqs_hz != first.freqs_hz:
            raise ContractError("tensors use different frequency grids")
        if t.values.shape != first.values.shape:
            raise ContractError("tensors differ in shape")
    return np.stack([t.values for t in per_epoch]), first


def band_median_pdc(per_epoch, band):
    """Median coupling per direction over all (epoch, in-band frequency).

    The diagonal entries are self-loops; they are reported but carry no
    coupling meaning.
    """
    stacked, first = _stack(per_epoch)
    idx = band_indices(first.freqs_hz, band)
    return np.median(stacked[:, :, :, idx], axis=(0, 3))


def flow_map(per_epoch, band, class_label, edges=None):
    """Inflow/outflow per channel from the epoch-median tensor.

    With m[i, j, f] the per-direction median over epochs,
    outflow[j] = sum over i != j and in-band f of m[i, j, f]^2 and
    inflow[i] mirrors it over sources. The optional edges list restricts
    the sums to the given (from, to) pairs.
    """
    stacked, first = _stack(per_epoch)
    idx = band_indices(first.freqs_hz, band)
    med = np.median(stacked[:, :, :, idx], axis=0)
    m = med.shape[0]
    mask = ~np.eye(m, dtype=bool)
    if edges is not None:
        allowed = np.zeros((m, m), dtype=bool)
        for src, dst in edges:
            if src == dst:
                raise ContractError("self-loop (%d, %d) in edges"
                                    % (src, dst))
            allowed[dst, src] = True
        mask &= allowed
    power = np.sum(med ** 2, axis=2) * mask
    outflow = power.sum(axis=0)
    inflow = power.sum(axis=1)
    return FlowMap(tuple(outflow), tuple(inflow), (float(band[0]),
                   float(band[1])), class_label)
