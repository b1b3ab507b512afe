"""Multi-second frequency prediction via artificial data points.

The filter natively predicts one step ahead. To reach a seconds-long
horizon, averaged first/second derivatives of the last ten estimates seed a
recursive extrapolation (position step, then velocity step), and the
resulting artificial points are assimilated by a clone of the live filter
as pseudo-measurements. The last filtered value is the horizon estimate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .filtering import assimilate, estimate
from .pmu import FrequencySample

WINDOW_SIZE = 10

_SPACING_TOL = 1e-6


def num_adps(t_p, f_s):
    """Number of artificial points covering a horizon of t_p seconds at f_s Hz."""
    if not t_p > 0:
        raise ConfigurationError(f"t_p must be > 0, got {t_p!r}")
    if not f_s > 0:
        raise ConfigurationError(f"f_s must be > 0, got {f_s!r}")
    n = round(t_p * f_s)
    return max(1, n)


@dataclass(frozen=True)
class DerivativeWindow:
    """The last ten frequency estimates, uniformly spaced by t_s seconds."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != WINDOW_SIZE or len(self.values) != WINDOW_SIZE:
            raise ConfigurationError(f"derivative window needs exactly {WINDOW_SIZE} samples")
        gaps = np.diff(self.times)
        if np.any(np.abs(gaps - gaps[0]) > _SPACING_TOL) or gaps[0] <= 0:
            raise ConfigurationError("derivative window samples must be uniformly spaced")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("derivative window contains non-finite values")

    @property
    def t_s(self):
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class AdpVector:
    """Extrapolated frequency points; the first lands t_s after the window end."""

    values: np.ndarray
    t_start: float


@dataclass(frozen=True)
class Prediction:
    """Horizon forecast: trajectory of filtered artificial points and endpoint f_p."""

    t_made: float
    t_p: float
    f1: float
    trajectory: np.ndarray
    f_p: float

    @property
    def times(self):
        n = len(self.trajectory)
        spacing = self.t_p / n
        return self.t_made + spacing * np.arange(1, n + 1)


def estimate_derivatives(window):
    """Averaged first and second finite differences of the window.

    Returns (fprime, fsecond): the mean of the 9 first differences over t_s
    and the mean of the 8 second differences over t_s^2.
    """
    t_s = window.t_s
    d1 = np.diff(window.values)
    d2 = np.diff(window.values, n=2)
    return float(d1.mean() / t_s), float(d2.mean() / (t_s * t_s))


def generate_adps(last, fprime, fsecond, n, t_s, t_last=0.0):
    """Recursive extrapolation from the last value.

    Each step advances the position by t_s * fprime, then the velocity by
    t_s * fsecond, so the quadratic term compounds across steps.
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n!r}")
    values = np.empty(n)
    adp = last
    fp = fprime
    for i in range(n):
        adp = adp + t_s * fp
        fp = fp + t_s * fsecond
        values[i] = adp
    return AdpVector(values=values, t_start=t_last + t_s)


def predict_horizon(pset, window, t_p, f_s, config, rng=None):
    """Extend the filter t_p seconds ahead by assimilating artificial points.

    Works on a clone of the particle set with an independent RNG stream, so
    the live filter (state and randomness) is untouched. The filter must be
    synchronized with the window's last sample.
    """
    if abs(pset.t - window.times[-1]) > _SPACING_TOL:
        raise ConfigurationError(
            f"filter time {pset.t:.6f} is not synchronized with window end {window.times[-1]:.6f}"
        )
    n = num_adps(t_p, f_s)
    fprime, fsecond = estimate_derivatives(window)
    adps = generate_adps(window.values[-1], fprime, fsecond, n, 1.0 / f_s, t_last=pset.t)
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(7771, pset.k)))
    clone = pset.clone(rng)
    f1 = float(estimate(pset)[0])
    trajectory = np.empty(n)
    for i in range(n):
        z = FrequencySample(t=pset.t + (i + 1) / f_s, f_meas=float(adps.values[i]), seq=i)
        clone = assimilate(clone, z, config)
        trajectory[i] = estimate(clone)[0]
    if not math.isfinite(trajectory[-1]):
        raise ConfigurationError("horizon prediction diverged to non-finite values")
    return Prediction(t_made=pset.t, t_p=float(t_p), f1=f1, trajectory=trajectory, f_p=float(trajectory[-1]))
