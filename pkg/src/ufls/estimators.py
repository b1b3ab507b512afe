"""Scikit-learn compatible front end for the frequency tracker.

Wraps the particle filter and the horizon extrapolation in an estimator so
the algorithm composes with pipelines and model-selection tooling: fit
consumes a uniformly sampled measurement series, transform denoises one,
and predict extends the fitted series into the future.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .filtering import FilterConfig, assimilate, estimate, init_particles
from .horizon import WINDOW_SIZE, DerivativeWindow, predict_horizon
from .pmu import FrequencySample
from .validation import as_measurement_array, check_positive


class ParticleFrequencyFilter(BaseEstimator, TransformerMixin):
    """Particle-filter tracker of a noisy frequency series.

    Parameters
    ----------
    n_particles : int, default=1000
        Ensemble size.
    process_noise_f : float, default=1e-6
        Per-step frequency process-noise variance, Hz^2.
    process_noise_fdot : float, default=1e-3
        Per-step rate process-noise variance, (Hz/s)^2.
    measurement_noise : float, default=0.025
        Measurement-noise variance of the Gaussian likelihood, Hz^2.
    sample_rate : float, default=30.0
        Reporting rate of the input series, Hz.
    init_spread : float, default=0.1
        Standard deviation of the initial frequency prior around the first
        sample, Hz.
    horizon : float, default=3.0
        Default prediction horizon for :meth:`predict`, seconds.
    random_state : int or None, default=None
        Seed for the particle RNG; None behaves like 0 so results are
        reproducible by default.

    Attributes
    ----------
    estimates_ : ndarray of shape (n_samples, 2)
        Filtered [frequency, rate] per input sample.
    filter_ : ParticleSet
        Particle ensemble after the last fitted sample.
    n_features_in_ : int
        Always 1 (a single measurement channel).
    """

    def __init__(
        self,
        n_particles=1000,
        process_noise_f=1e-6,
        process_noise_fdot=1e-3,
        measurement_noise=0.025,
        sample_rate=30.0,
        init_spread=0.1,
        horizon=3.0,
        random_state=None,
    ):
        self.n_particles = n_particles
        self.process_noise_f = process_noise_f
        self.process_noise_fdot = process_noise_fdot
        self.measurement_noise = measurement_noise
        self.sample_rate = sample_rate
        self.init_spread = init_spread
        self.horizon = horizon
        self.random_state = random_state

    def _config(self):
        return FilterConfig(
            n_particles=self.n_particles,
            q_f=self.process_noise_f,
            q_fdot=self.process_noise_fdot,
            rm=self.measurement_noise,
            seed=0 if self.random_state is None else int(self.random_state),
        )

    def _run(self, X):
        check_positive(self.sample_rate, "sample_rate")
        series = as_measurement_array(X)
        config = self._config()
        pset = init_particles(config, f_prior=series[0], spread=self.init_spread, t0=0.0)
        out = np.empty((len(series), 2))
        for k, value in enumerate(series):
            z = FrequencySample(t=(k + 1) / self.sample_rate, f_meas=float(value), seq=k)
            pset = assimilate(pset, z, config)
            out[k] = estimate(pset)
        return out, pset

    def fit(self, X, y=None):
        """Run the tracker over the series and keep the terminal state.

        X is a 1-D array (or single column) of frequency measurements taken
        every 1/sample_rate seconds.
        """
        estimates, pset = self._run(X)
        self.estimates_ = estimates
        self.filter_ = pset
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        """Denoise a measurement series; returns (n, 2) columns [f, fdot].

        Runs a fresh, identically seeded filtering pass, so it is
        repeatable and leaves the fitted state untouched.
        """
        self._check_fitted()
        estimates, _ = self._run(X)
        return estimates

    def predict(self, X=None, horizon=None):
        """Extrapolate the fitted series; returns the predicted trajectory.

        The forecast is seeded with averaged derivatives of the last ten
        fitted estimates and refined through the filter, giving
        ``num_adps(horizon, sample_rate)`` values spaced 1/sample_rate
        seconds after the last fitted sample. ``X`` is accepted for
        interface compatibility and, when given, is fitted first.
        """
        if X is not None:
            self.fit(X)
        self._check_fitted()
        if len(self.estimates_) < WINDOW_SIZE:
            raise ValueError(
                f"predict needs at least {WINDOW_SIZE} fitted samples, "
                f"got {len(self.estimates_)}"
            )
        span = horizon if horizon is not None else self.horizon
        check_positive(span, "horizon")
        rate = float(self.sample_rate)
        n_hist = len(self.estimates_)
        times = (np.arange(n_hist - WINDOW_SIZE + 1, n_hist + 1)) / rate
        window = DerivativeWindow(times=times, values=self.estimates_[-WINDOW_SIZE:, 0].copy())
        pred = predict_horizon(self.filter_, window, span, rate, self._config())
        return pred.trajectory.copy()

    def _check_fitted(self):
        if not hasattr(self, "estimates_"):
            raise NotFittedError(
                "This ParticleFrequencyFilter instance is not fitted yet; call fit first."
            )


__all__ = ["ParticleFrequencyFilter"]
