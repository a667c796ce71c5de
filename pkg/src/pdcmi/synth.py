"""Ground-truth generators for every end-to-end verification.

Builds stationary multichannel AR processes with a prescribed directed
coupling graph, simulates them reproducibly, and assembles two-class
datasets in which chosen couplings or rhythms exist in only one class.
All shared dynamics are identical across classes, so any detected
difference is the planted one.
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import ContractError, StabilityError
from .io import (CLASS1, CLASS2, DEFAULT_CHANNEL_NAMES, Epoch, EpochSet)
from .mvar import MvarModel


def coupling_edges_of(model):
    """Ordered (from, to) pairs with a nonzero off-diagonal coefficient."""
    edges = []
    m = model.n_channels
    for j in range(m):
        for i in range(m):
            if i != j and np.any(model.coeff_matrices[:, i, j] != 0):
                edges.append((j, i))
    return tuple(edges)


@dataclass(frozen=True)
class GroundTruth:
    """A true model, its coupling graph, and the seed that realizes it."""
    model: MvarModel
    coupling_edges: tuple
    seed: object

    def __post_init__(self):
        object.__setattr__(self, "coupling_edges",
                           tuple(self.coupling_edges))
        if set(self.coupling_edges) != set(coupling_edges_of(self.model)):
            raise ContractError(
                "coupling_edges do not match the coefficient pattern")

    @classmethod
    def from_model(cls, model, seed):
        return cls(model, coupling_edges_of(model), seed)


def companion_matrix(model):
    """Block companion form [[A_1..A_p], [I, 0]] of size Mp x Mp."""
    m = model.n_channels
    p = model.order_p
    top = model.coeff_matrices.transpose(1, 0, 2).reshape(m, m * p)
    comp = np.zeros((m * p, m * p))
    comp[:m] = top
    if p > 1:
        comp[m:, :m * (p - 1)] = np.eye(m * (p - 1))
    return comp


def check_stability(model):
    """Spectral radius of the companion matrix; stable iff < 1."""
    return float(np.max(np.abs(np.linalg.eigvals(companion_matrix(model)))))


def _innovations(rng, n, noise_cov):
    m = noise_cov.shape[0]
    draws = rng.standard_normal((n, m))
    if np.array_equal(noise_cov, np.eye(m)):
        return draws
    if np.array_equal(noise_cov, np.diag(np.diag(noise_cov))):
        return draws * np.sqrt(np.diag(noise_cov))
    return draws @ np.linalg.cholesky(noise_cov).T


def generate(truth, n_samples, burn_in=None, seed=None):
    """Simulate the true process; returns [M x n_samples].

    Iterates the model forward from a zero pre-sample state with Gaussian
    innovations of the model's covariance, discards burn_in samples
    (default 100 x order), and keeps exactly n_samples. Reproducible from
    the seed (truth.seed unless overridden).
    """
    radius = check_stability(truth.model)
    if radius >= 1.0:
        raise StabilityError("companion spectral radius %.4f >= 1" % radius)
    if n_samples < 1:
        raise ContractError("n_samples must be >= 1")
    p = truth.model.order_p
    m = truth.model.n_channels
    if burn_in is None:
        burn_in = 100 * p
    if burn_in < 0:
        raise ContractError("burn_in must be >= 0")
    rng = np.random.default_rng(truth.seed if seed is None else seed)
    innov = _innovations(rng, burn_in + n_samples, truth.model.noise_cov)
    x = backend.mvar_simulate(truth.model.coeff_matrices, innov,
                              np.zeros((p, m)))
    return x[burn_in:].T


def stable_random_model(n_channels, order, rng, radius=0.9):
    """Random dense model rescaled to an exact companion radius.

    Scaling A_k by s^k scales every companion eigenvalue by s, so the
    target radius is hit exactly rather than by rejection.
    """
    if not (0 < radius < 1):
        raise ContractError("radius must be in (0, 1)")
    for _ in range(100):
        coeffs = rng.standard_normal((order, n_channels, n_channels))
        coeffs /= n_channels
        model = MvarModel(coeffs, np.eye(n_channels))
        rho = check_stability(model)
        if rho > 0:
            scale = (radius / rho) ** np.arange(1, order + 1)
            return MvarModel(coeffs * scale[:, None, None],
                             np.eye(n_channels))
    raise ContractError("could not draw a nonzero model")


@dataclass(frozen=True)
class Coupling:
    """Directed lag coupling, optionally present in one class only."""
    from_channel: int
    to_channel: int
    gain: float
    lag: int = 1
    only_class: int = 0  # 0 = both classes


@dataclass(frozen=True)
class ScenarioConfig:
    """Two-class dataset recipe.

    Every channel starts as an AR(1) with coefficient base_diag.
    diag_overrides replaces that coefficient per channel; resonances turn
    channels into AR(2) oscillators with the given center frequency and
    pole radius; couplings add directed off-diagonal coefficients, each
    either shared or restricted to one class. Innovations are unit white
    noise.
    """
    n_channels: int = 16
    sample_rate_hz: float = 240.0
    epoch_seconds: float = 1.0
    epochs_per_class: int = 30
    seed: int = 0
    base_diag: float = 0.5
    diag_overrides: tuple = ()       # ((channel, coefficient), ...)
    resonances: tuple = ()           # ((channel, freq_hz, radius), ...)
    couplings: tuple = ()            # (Coupling, ...)
    burn_in: int = None

    @property
    def order(self):
        order = 2 if self.resonances else 1
        for c in self.couplings:
            order = max(order, c.lag)
        return order


def scenario_model(config, class_label):
    """True coefficient matrices for one class of the scenario."""
    m = config.n_channels
    p = config.order
    coeffs = np.zeros((p, m, m))
    coeffs[0] = config.base_diag * np.eye(m)
    for channel, value in config.diag_overrides:
        coeffs[0, channel, channel] = value
    for channel, freq_hz, radius in config.resonances:
        theta = 2.0 * np.pi * freq_hz / config.sample_rate_hz
        coeffs[0, channel, channel] = 2.0 * radius * np.cos(theta)
        coeffs[1, channel, channel] = -radius * radius
    for c in config.couplings:
        if c.from_channel == c.to_channel:
            raise ContractError("coupling cannot be a self-loop")
        if c.only_class in (0, class_label):
            coeffs[c.lag - 1, c.to_channel, c.from_channel] += c.gain
    return MvarModel(coeffs, np.eye(m))


def make_two_class_scenario(config):
    """Generate the dataset; returns (EpochSet, {class: GroundTruth}).

    Epoch e of class c is simulated with its own generator seeded by the
    triple [config.seed, c, e], so epochs are independent and any subset
    is reproducible in isolation.
    """
    if config.epochs_per_class < 1:
        raise ContractError("epochs_per_class must be >= 1")
    truths = {}
    for label in (CLASS1, CLASS2):
        model = scenario_model(config, label)
        radius = check_stability(model)
        if radius >= 1.0:
            raise StabilityError(
                "class %d model has companion radius %.4f" % (label, radius))
        truths[label] = GroundTruth.from_model(model, config.seed)
    n = int(round(config.sample_rate_hz * config.epoch_seconds))
    burn = config.burn_in
    if burn is None:
        burn = 100 * config.order
    epochs = []
    for label in (CLASS1, CLASS2):
        for e in range(config.epochs_per_class):
            x = generate(truths[label], n, burn_in=burn,
                         seed=[config.seed, label, e])
            epochs.append(Epoch(x, label, e))
    if config.n_channels == len(DEFAULT_CHANNEL_NAMES):
        names = DEFAULT_CHANNEL_NAMES
    else:
        names = tuple("ch%02d" % i for i in range(config.n_channels))
    return EpochSet(epochs, config.sample_rate_hz, names), truths


def edge_scenario(epochs_per_class=30, seed=0, gain=0.4):
    """One class-1-only coupling C3 -> C4 on otherwise identical noise."""
    return ScenarioConfig(
        sample_rate_hz=240.0,
        epoch_seconds=1.0,
        epochs_per_class=epochs_per_class,
        seed=seed,
        couplings=(Coupling(4, 6, gain, only_class=CLASS1),),
        burn_in=100,
    )


def rhythm_scenario(epochs_per_class=30, seed=0, gain=0.006):
    """Class-gated 24 Hz rhythm reaching channel 13 (P4) in class 1 only.

    Channels 9 and 10 form a two-stage resonator chain at a quarter of
    the sample rate; the chain output couples into the white-floor target
    channel only in class 1. Designed for a 2 Hz analysis grid with Burg
    order 16; see the package README for the analysis settings.
    """
    return ScenarioConfig(
        sample_rate_hz=96.0,
        epoch_seconds=16.0,
        epochs_per_class=epochs_per_class,
        seed=seed,
        diag_overrides=((13, 0.0),),
        resonances=((9, 24.0, 0.97), (10, 24.0, 0.97)),
        couplings=(Coupling(9, 10, 1.0),
                   Coupling(10, 13, gain, only_class=CLASS1)),
        burn_in=400,
    )
