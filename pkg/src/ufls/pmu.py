"""PMU emulation: 30 Hz frequency reports with additive Gaussian noise.

The controller never sees the grid directly; this module is its only view.
True frequency at a sample instant is read from the nearest grid step at or
before it (at most one integration step old).
"""

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_non_negative, check_positive

_EPS = 1e-9

DEFAULT_RATE_HZ = 30.0


@dataclass(frozen=True)
class FrequencySample:
    """One reported measurement: timestamp, noisy frequency, sequence number."""

    t: float
    f_meas: float
    seq: int


@dataclass(frozen=True)
class NoiseModel:
    """Additive Gaussian measurement noise, variance in Hz^2."""

    variance: float = 0.025
    seed: int = 0

    def __post_init__(self):
        check_non_negative(self.variance, "noise variance")

    def make_rng(self):
        return np.random.default_rng(self.seed)


class PmuSampler:
    """Stateful sampler producing a reproducible measurement sequence."""

    def __init__(self, noise, rate=DEFAULT_RATE_HZ):
        check_positive(rate, "rate")
        self.rate = float(rate)
        self.sigma = math.sqrt(noise.variance)
        self._rng = noise.make_rng()
        self._seq = 0

    def sample(self, t, f_true):
        s = FrequencySample(t=t, f_meas=f_true + self._rng.normal(0.0, self.sigma), seq=self._seq)
        self._seq += 1
        return s


def sample_stream(trajectory, noise, rate=DEFAULT_RATE_HZ):
    """Sample a uniformly spaced trajectory at the reporting rate.

    The first trajectory state is the stream reference; reports are emitted
    every 1/rate seconds after it, so a trajectory shorter than one
    reporting period yields an empty stream. Fixed seed => bit-identical
    output.
    """
    if len(trajectory) < 2:
        return []
    sampler = PmuSampler(noise, rate)
    t_ref = trajectory[0].t
    dt = trajectory[1].t - t_ref
    samples = []
    k = 1
    while True:
        offset = k / sampler.rate
        idx = math.floor(offset / dt + _EPS)
        if idx >= len(trajectory):
            break
        samples.append(sampler.sample(t_ref + offset, trajectory[idx].f))
        k += 1
    return samples
