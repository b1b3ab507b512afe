"""Horizon predictor tests: finite-difference oracles and hand-traced recursions."""

import numpy as np
import pytest

from ufls.errors import ConfigurationError
from ufls.filtering import FilterConfig, ParticleSet, estimate, init_particles
from ufls.horizon import (
    WINDOW_SIZE,
    DerivativeWindow,
    estimate_derivatives,
    generate_adps,
    num_adps,
    predict_horizon,
)

T_S = 1.0 / 30.0


def window_from(fn, t_last=1.0):
    times = t_last + T_S * (np.arange(WINDOW_SIZE) - (WINDOW_SIZE - 1))
    return DerivativeWindow(times=times, values=np.array([fn(t) for t in times]))


def line_set(f_last, slope, t_last, n=200, seed=0):
    x = np.tile([f_last, slope], (n, 1))
    w = np.full(n, 1.0 / n)
    return ParticleSet(x=x, w=w, k=0, t=t_last, rng=np.random.default_rng(seed))


# --- num_adps -------------------------------------------------------------------

@pytest.mark.parametrize("t_p,f_s,expected", [(3.0, 30.0, 90), (1.0 / 30.0, 30.0, 1), (2.0, 30.0, 60)])
def test_num_adps_values(t_p, f_s, expected):
    assert num_adps(t_p, f_s) == expected


@pytest.mark.parametrize("t_p,f_s", [(0.0, 30.0), (-1.0, 30.0), (3.0, 0.0), (3.0, -5.0)])
def test_num_adps_rejects_non_positive(t_p, f_s):
    with pytest.raises(ConfigurationError):
        num_adps(t_p, f_s)


# --- derivative window ------------------------------------------------------------

def test_window_requires_ten_uniform_samples():
    with pytest.raises(ConfigurationError):
        DerivativeWindow(times=np.arange(9) * T_S, values=np.zeros(9))
    times = np.arange(10) * T_S
    times[5] += 0.01
    with pytest.raises(ConfigurationError):
        DerivativeWindow(times=times, values=np.zeros(10))


def test_derivatives_constant_window():
    fprime, fsecond = estimate_derivatives(window_from(lambda t: 60.0))
    assert fprime == 0.0
    assert fsecond == 0.0


def test_derivatives_exact_line():
    fprime, fsecond = estimate_derivatives(window_from(lambda t: 60.0 - 0.5 * t))
    assert fprime == pytest.approx(-0.5, abs=1e-9)
    assert fsecond == pytest.approx(0.0, abs=1e-6)


def test_derivatives_exact_parabola():
    # f = 60 - 0.1 t^2: second derivative -0.2 exactly; first derivative equals
    # the mean slope of the window, which is the slope at the window center
    window = window_from(lambda t: 60.0 - 0.1 * t * t, t_last=1.0)
    fprime, fsecond = estimate_derivatives(window)
    t_center = window.times.mean()
    assert fsecond == pytest.approx(-0.2, rel=1e-6)
    assert fprime == pytest.approx(-0.2 * t_center, rel=1e-9)


# --- ADP generation ------------------------------------------------------------------

def test_adps_zero_derivatives_repeat_last():
    adps = generate_adps(59.5, 0.0, 0.0, 5, T_S)
    assert np.all(adps.values == 59.5)


def test_adps_arithmetic_progression():
    adps = generate_adps(59.8, -0.3, 0.0, 3, T_S)
    assert adps.values == pytest.approx([59.79, 59.78, 59.77], abs=1e-12)


def test_adps_hand_traced_quadratic():
    # step 1: adp = 60 + t_s*0 = 60.0, then f' <- -0.9/30
    # step 2: adp = 60 - 0.9/900 = 59.999
    adps = generate_adps(60.0, 0.0, -0.9, 2, T_S)
    assert adps.values == pytest.approx([60.0, 60.0 - 0.9 / 900.0], abs=1e-12)


def test_adps_count_matches_request():
    for n in (1, 7, 90):
        assert len(generate_adps(60.0, -0.1, 0.01, n, T_S).values) == n
    with pytest.raises(ConfigurationError):
        generate_adps(60.0, 0.0, 0.0, 0, T_S)


# --- predict_horizon -------------------------------------------------------------------

def test_exact_linear_prediction_to_machine_precision():
    # noise-free exactly linear history, zero process noise: the chain and the
    # filtered endpoint reproduce the line
    slope, t_last = -0.5, 2.0
    window = window_from(lambda t: 60.0 + slope * t, t_last=t_last)
    config = FilterConfig(n_particles=100, q_f=0.0, q_fdot=0.0, rm=0.025, seed=3)
    pset = line_set(60.0 + slope * t_last, slope, t_last)
    pred = predict_horizon(pset, window, 3.0, 30.0, config)
    expected = 60.0 + slope * (t_last + 3.0)
    assert abs(pred.f_p - expected) <= 1e-9
    assert len(pred.trajectory) == num_adps(3.0, 30.0) == 90
    assert np.max(np.abs(pred.trajectory - (60.0 + slope * pred.times))) <= 1e-9


def test_prediction_timestamps_span_horizon():
    window = window_from(lambda t: 60.0, t_last=1.0)
    config = FilterConfig(n_particles=50, q_f=0.0, q_fdot=0.0, seed=1)
    pset = line_set(60.0, 0.0, 1.0, n=50)
    pred = predict_horizon(pset, window, 3.0, 30.0, config)
    assert pred.times[0] == pytest.approx(1.0 + T_S)
    assert pred.times[-1] == pytest.approx(4.0)
    assert np.allclose(np.diff(pred.times), T_S)


def test_flat_history_predicts_current_level():
    config = FilterConfig(n_particles=1000, q_f=1e-6, q_fdot=1e-3, rm=0.025, seed=5)
    pset = init_particles(config, 60.0, 0.01)
    pset.t = 1.0
    window = window_from(lambda t: 60.0, t_last=1.0)
    pred = predict_horizon(pset, window, 3.0, 30.0, config)
    assert pred.f_p == pytest.approx(pred.f1, abs=2e-2)


def test_noise_free_ramp_prediction_within_tenth_hz():
    # filter locked onto a clean -0.5 Hz/s ramp extrapolates it over 3 s
    from ufls.filtering import assimilate
    from ufls.pmu import FrequencySample

    config = FilterConfig(n_particles=2000, q_f=1e-8, q_fdot=1e-3, rm=0.025, seed=7)
    pset = init_particles(config, 60.0, 0.01)
    ests = []
    for k in range(120):
        t = (k + 1) / 30.0
        pset = assimilate(pset, FrequencySample(t=t, f_meas=60.0 - 0.5 * t, seq=k), config)
        ests.append((t, float(estimate(pset)[0])))
    times = np.array([e[0] for e in ests[-WINDOW_SIZE:]])
    values = np.array([e[1] for e in ests[-WINDOW_SIZE:]])
    pred = predict_horizon(pset, DerivativeWindow(times, values), 3.0, 30.0, config)
    truth = 60.0 - 0.5 * (times[-1] + 3.0)
    assert pred.f_p == pytest.approx(truth, abs=0.1)
    assert pred.f_p == pytest.approx(pred.f1 - 1.5, abs=0.1)


def test_snapshot_isolation():
    config = FilterConfig(n_particles=400, seed=11)
    pset = init_particles(config, 60.0, 0.1)
    pset.t = 1.0
    window = window_from(lambda t: 60.0 - 0.2 * t, t_last=1.0)
    before_x = pset.x.copy()
    before_w = pset.w.copy()
    before_est = estimate(pset)
    rng_probe = np.random.default_rng(0)  # independent draw pattern reference
    predict_horizon(pset, window, 3.0, 30.0, config)
    assert np.array_equal(pset.x, before_x)
    assert np.array_equal(pset.w, before_w)
    assert np.array_equal(estimate(pset), before_est)
    del rng_probe


def test_live_stream_unaffected_by_prediction():
    # assimilating after a prediction gives bit-identical results to never
    # having predicted: the clone consumes its own randomness
    from ufls.filtering import assimilate
    from ufls.pmu import FrequencySample

    def run(with_prediction):
        config = FilterConfig(n_particles=300, seed=13)
        pset = init_particles(config, 60.0, 0.1)
        ests = []
        for k in range(30):
            t = (k + 1) / 30.0
            pset = assimilate(pset, FrequencySample(t=t, f_meas=60.0, seq=k), config)
            ests.append((t, float(estimate(pset)[0])))
        if with_prediction:
            times = np.array([e[0] for e in ests[-WINDOW_SIZE:]])
            values = np.array([e[1] for e in ests[-WINDOW_SIZE:]])
            predict_horizon(pset, DerivativeWindow(times, values), 1.0, 30.0, config)
        pset = assimilate(pset, FrequencySample(t=31 / 30.0, f_meas=60.0, seq=30), config)
        return estimate(pset)

    assert np.array_equal(run(False), run(True))


def test_out_of_sync_window_rejected():
    config = FilterConfig(n_particles=50, seed=17)
    pset = line_set(60.0, 0.0, t_last=5.0, n=50)
    window = window_from(lambda t: 60.0, t_last=1.0)
    with pytest.raises(ConfigurationError):
        predict_horizon(pset, window, 3.0, 30.0, config)
