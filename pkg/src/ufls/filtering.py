"""Sequential Monte Carlo tracker of system frequency.

State vector per particle is [f, fdot] with constant-velocity kinematics, a
bootstrap proposal (process transition as importance density) and a Gaussian
frequency likelihood. Every measurement runs the full cycle: propagate,
reweight, systematic resample. Weights are kept normalized to 1 after every
update.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateWeightsError
from .validation import check_int_at_least, check_non_negative, check_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Particle:
    """Single hypothesis: state [f, fdot] and importance weight."""

    x: np.ndarray
    w: float


@dataclass(frozen=True)
class FilterConfig:
    """Tracker tuning.

    q_f / q_fdot are the diagonal process-noise variances added per
    propagation step (Hz^2 and (Hz/s)^2); rm is the measurement-noise
    variance of the Gaussian likelihood (Hz^2).
    """

    n_particles: int = 1000
    q_f: float = 1e-6
    q_fdot: float = 1e-3
    rm: float = 0.025
    seed: int = 0

    def __post_init__(self):
        check_int_at_least(self.n_particles, "n_particles", 2)
        check_non_negative(self.q_f, "q_f")
        check_non_negative(self.q_fdot, "q_fdot")
        check_positive(self.rm, "rm")


@dataclass
class ParticleSet:
    """Weighted ensemble: x is (N, 2) states, w is (N,) weights summing to 1.

    The set owns its RNG stream; ops that draw randomness advance it. ``k``
    counts assimilated measurements, ``t`` is the time of the last one.
    """

    x: np.ndarray
    w: np.ndarray
    k: int = 0
    t: float = 0.0
    rng: np.random.Generator = field(default_factory=np.random.default_rng, repr=False)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def particles(self):
        """Typed per-particle view (copies; for inspection, not hot paths)."""
        return [Particle(x=self.x[i].copy(), w=float(self.w[i])) for i in range(self.n)]

    def clone(self, rng):
        """Deep copy of the ensemble with an independent RNG stream."""
        return ParticleSet(x=self.x.copy(), w=self.w.copy(), k=self.k, t=self.t, rng=rng)


def init_particles(config, f_prior, spread, t0=0.0):
    """Draw N particles with f ~ N(f_prior, spread^2), fdot = 0, uniform weights."""
    if config.n_particles < 2:
        raise ConfigurationError("n_particles must be at least 2")
    check_non_negative(spread, "spread")
    rng = np.random.default_rng(config.seed)
    x = np.empty((config.n_particles, 2))
    x[:, 0] = f_prior + spread * rng.standard_normal(config.n_particles)
    x[:, 1] = 0.0
    w = np.full(config.n_particles, 1.0 / config.n_particles)
    return ParticleSet(x=x, w=w, k=0, t=t0, rng=rng)


def propagate(pset, dt, config):
    """Constant-velocity advance plus per-step process noise; weights unchanged."""
    if dt <= 0:
        raise ConfigurationError(f"dt must be > 0, got {dt!r}")
    x = pset.x.copy()
    x[:, 0] += x[:, 1] * dt
    if config.q_f > 0.0:
        x[:, 0] += np.sqrt(config.q_f) * pset.rng.standard_normal(pset.n)
    if config.q_fdot > 0.0:
        x[:, 1] += np.sqrt(config.q_fdot) * pset.rng.standard_normal(pset.n)
    return ParticleSet(x=x, w=pset.w.copy(), k=pset.k, t=pset.t + dt, rng=pset.rng)


def update_weights(pset, z, config):
    """Reweight by the Gaussian likelihood of the measured frequency.

    w_i proportional to w_i_prev * exp(-(z - f_i)^2 / (2 rm)), normalized to
    sum 1. Computed in log space; raises DegenerateWeightsError if every
    likelihood underflows.
    """
    resid = z.f_meas - pset.x[:, 0]
    with np.errstate(divide="ignore"):
        logw = np.log(pset.w) - resid * resid / (2.0 * config.rm)
    peak = np.max(logw)
    if not np.isfinite(peak):
        raise DegenerateWeightsError(f"all particle likelihoods vanished at t={z.t:.6f}")
    w = np.exp(logw - peak)
    total = w.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise DegenerateWeightsError(f"weight normalization failed at t={z.t:.6f}")
    w /= total
    return ParticleSet(x=pset.x.copy(), w=w, k=pset.k, t=pset.t, rng=pset.rng)


def estimate(pset):
    """Posterior point estimate: weighted mean [f, fdot]."""
    return pset.w @ pset.x


def resample(pset, rng=None):
    """Systematic resampling with replacement; weights reset to exactly 1/N.

    One uniform draw places N evenly spaced positions over the cumulative
    weights, so copy counts deviate from N*w_i by less than one cell.
    """
    rng = pset.rng if rng is None else rng
    n = pset.n
    positions = (np.arange(n) + rng.random()) / n
    cumulative = np.cumsum(pset.w)
    cumulative[-1] = 1.0
    idx = np.searchsorted(cumulative, positions, side="right")
    x = pset.x[idx].copy()
    w = np.full(n, 1.0 / n)
    return ParticleSet(x=x, w=w, k=pset.k, t=pset.t, rng=pset.rng)


def assimilate(pset, z, config):
    """Full per-measurement cycle: propagate, reweight, resample.

    Resampling runs unconditionally every measurement. A degenerate weight
    update (outlier measurement) resets to uniform weights and keeps going.
    """
    dt = z.t - pset.t
    pset = propagate(pset, dt, config)
    try:
        pset = update_weights(pset, z, config)
    except DegenerateWeightsError:
        logger.warning("degenerate weights at t=%.6f; reset to uniform", z.t)
        pset = ParticleSet(
            x=pset.x.copy(), w=np.full(pset.n, 1.0 / pset.n), k=pset.k, t=pset.t, rng=pset.rng
        )
    pset = resample(pset)
    pset.k += 1
    return pset
