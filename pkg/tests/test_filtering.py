"""Particle filter tests: hand-computed oracles, statistics, invariants."""

import math

import numpy as np
import pytest
from scipy import stats

from ufls.errors import ConfigurationError, DegenerateWeightsError
from ufls.filtering import (
    FilterConfig,
    ParticleSet,
    assimilate,
    estimate,
    init_particles,
    propagate,
    resample,
    update_weights,
)
from ufls.pmu import FrequencySample

RATE = 30.0


def make_set(states, weights, seed=0):
    x = np.array(states, dtype=float)
    w = np.array(weights, dtype=float)
    return ParticleSet(x=x, w=w, k=0, t=0.0, rng=np.random.default_rng(seed))


def run_stream(config, measurements, f_prior=60.0, spread=0.1):
    pset = init_particles(config, f_prior, spread)
    out = []
    for k, f_meas in enumerate(measurements):
        z = FrequencySample(t=(k + 1) / RATE, f_meas=f_meas, seq=k)
        pset = assimilate(pset, z, config)
        out.append(estimate(pset))
    return pset, np.array(out)


# --- init ----------------------------------------------------------------------

def test_init_requires_two_particles():
    with pytest.raises(ConfigurationError):
        FilterConfig(n_particles=1)


def test_init_zero_spread_is_exact():
    pset = init_particles(FilterConfig(n_particles=50, seed=1), 60.0, 0.0)
    assert np.all(pset.x[:, 0] == 60.0)
    assert np.all(pset.x[:, 1] == 0.0)


def test_init_uniform_weights_sum_to_one():
    pset = init_particles(FilterConfig(n_particles=777, seed=2), 60.0, 0.1)
    assert np.all(pset.w == 1.0 / 777)
    assert abs(pset.w.sum() - 1.0) <= 1e-12


def test_init_prior_mean_clt_bound():
    n = 10_000
    pset = init_particles(FilterConfig(n_particles=n, seed=3), 60.0, 0.1)
    assert abs(pset.x[:, 0].mean() - 60.0) <= 0.004  # ~3 sigma / sqrt(N)


# --- propagate -------------------------------------------------------------------

def test_propagate_pure_kinematics():
    config = FilterConfig(n_particles=4, q_f=0.0, q_fdot=0.0, seed=0)
    pset = make_set([[60.0, -0.5]] * 4, [0.25] * 4)
    out = propagate(pset, 1.0 / RATE, config)
    assert np.all(out.x[:, 0] == 60.0 - 0.5 / RATE)  # exactly -1/60 Hz
    assert np.all(out.x[:, 1] == -0.5)
    assert np.all(out.w == 0.25)


def test_propagate_zero_everything_is_identity_in_f():
    config = FilterConfig(n_particles=8, q_f=0.0, q_fdot=0.0, seed=0)
    pset = make_set([[59.8, 0.0]] * 8, [1 / 8] * 8)
    out = propagate(pset, 0.1, config)
    assert np.all(out.x == pset.x)


def test_propagate_noise_injection_statistics():
    n = 10_000
    config = FilterConfig(n_particles=n, q_f=1e-6, q_fdot=1e-4, seed=9)
    pset = init_particles(config, 60.0, 0.0)
    out = propagate(pset, 1.0 / RATE, config)
    added_f = out.x[:, 0] - 60.0  # fdot = 0, so this is pure injected noise
    s2 = added_f.var(ddof=1)
    lo = 1e-6 * stats.chi2.ppf(0.005, n - 1) / (n - 1)
    hi = 1e-6 * stats.chi2.ppf(0.995, n - 1) / (n - 1)
    assert lo <= s2 <= hi
    s2_dot = out.x[:, 1].var(ddof=1)
    assert 1e-4 * 0.9 <= s2_dot <= 1e-4 * 1.1


def test_propagate_rejects_bad_dt():
    config = FilterConfig(n_particles=4)
    pset = init_particles(config, 60.0, 0.0)
    with pytest.raises(ConfigurationError):
        propagate(pset, 0.0, config)


# --- update_weights ---------------------------------------------------------------

def test_equidistant_particles_share_weight():
    config = FilterConfig(n_particles=2, rm=0.025)
    pset = make_set([[59.9, 0.0], [60.1, 0.0]], [0.5, 0.5])
    out = update_weights(pset, FrequencySample(t=0.1, f_meas=60.0, seq=0), config)
    assert out.w == pytest.approx([0.5, 0.5], abs=1e-15)


def test_ten_sigma_particle_gets_e_minus_fifty():
    rm = 0.025
    sigma = math.sqrt(rm)
    config = FilterConfig(n_particles=2, rm=rm)
    pset = make_set([[60.0, 0.0], [60.0 + 10 * sigma, 0.0]], [0.5, 0.5])
    out = update_weights(pset, FrequencySample(t=0.1, f_meas=60.0, seq=0), config)
    assert out.w[1] / out.w[0] == pytest.approx(math.exp(-50.0), rel=1e-9)
    assert out.w[0] == pytest.approx(1.0, abs=1e-15)  # near-total mass


def test_three_particle_oracle():
    # direct evaluation: likelihoods {e^-0.2, 1, e^-0.2} at rm = 0.025
    config = FilterConfig(n_particles=3, rm=0.025)
    pset = make_set([[59.9, 0.0], [60.0, 0.0], [60.1, 0.0]], [1 / 3] * 3)
    out = update_weights(pset, FrequencySample(t=0.1, f_meas=60.0, seq=0), config)
    lik = np.array([math.exp(-0.2), 1.0, math.exp(-0.2)])
    expected = lik / lik.sum()
    assert out.w == pytest.approx(expected, rel=1e-12)
    assert abs(out.w.sum() - 1.0) <= 1e-12


def test_non_finite_measurement_degenerates():
    config = FilterConfig(n_particles=3, rm=0.025)
    pset = make_set([[60.0, 0.0]] * 3, [1 / 3] * 3)
    with pytest.raises(DegenerateWeightsError):
        update_weights(pset, FrequencySample(t=0.1, f_meas=math.inf, seq=0), config)


def test_assimilate_recovers_from_degenerate_weights():
    config = FilterConfig(n_particles=16, rm=0.025, seed=4)
    pset = init_particles(config, 60.0, 0.1)
    out = assimilate(pset, FrequencySample(t=1 / RATE, f_meas=math.inf, seq=0), config)
    assert np.all(out.w == 1.0 / 16)
    assert out.k == 1


# --- estimate ----------------------------------------------------------------------

def test_estimate_symmetric_particles():
    pset = make_set([[59.0, 0.0], [61.0, 0.0]], [0.5, 0.5])
    assert estimate(pset)[0] == pytest.approx(60.0, abs=1e-15)


def test_estimate_single_heavy_particle():
    pset = make_set([[59.0, -1.0], [61.0, 2.0]], [1.0, 0.0])
    f, fdot = estimate(pset)
    assert (f, fdot) == (59.0, -1.0)


def test_estimate_hand_weighted_mean():
    pset = make_set([[59.0, 0.0], [61.0, 0.0]], [0.25, 0.75])
    assert estimate(pset)[0] == pytest.approx(60.5, abs=1e-15)


def test_estimate_invariant_under_permutation():
    rng = np.random.default_rng(5)
    x = rng.normal(60.0, 0.1, size=(100, 2))
    w = rng.random(100)
    w /= w.sum()
    perm = rng.permutation(100)
    a = estimate(make_set(x, w))
    b = estimate(make_set(x[perm], w[perm]))
    assert a == pytest.approx(b, rel=1e-12)


# --- resample ------------------------------------------------------------------------

def test_resample_uniform_weights_resets_to_uniform():
    config = FilterConfig(n_particles=64, seed=6)
    pset = init_particles(config, 60.0, 0.1)
    out = resample(pset)
    assert np.all(out.w == 1.0 / 64)
    assert out.n == 64
    assert abs(out.w.sum() - 1.0) <= 1e-12


def test_resample_degenerate_weight_takes_over():
    pset = make_set([[59.0, 0.0], [60.0, 0.0], [61.0, 0.0]], [0.0, 1.0, 0.0])
    out = resample(pset)
    assert np.all(out.x[:, 0] == 60.0)
    assert np.all(out.w == 1.0 / 3)


def test_resample_systematic_counts():
    # two support points carrying 0.7/0.3: systematic placement pins the copy
    # count of the first to 7000 +- 1 out of 10^4
    n = 10_000
    x = np.zeros((n, 2))
    x[0] = [1.0, 0.0]
    x[1] = [2.0, 0.0]
    x[2:] = [999.0, 0.0]
    w = np.zeros(n)
    w[0], w[1] = 0.7, 0.3
    pset = make_set(x, w, seed=12)
    out = resample(pset)
    count_one = int(np.sum(out.x[:, 0] == 1.0))
    assert 6999 <= count_one <= 7001
    assert int(np.sum(out.x[:, 0] == 999.0)) == 0
    assert out.n == n


# --- assimilate cycles -------------------------------------------------------------

def test_noise_free_convergence():
    config = FilterConfig(n_particles=500, q_f=1e-8, q_fdot=1e-6, rm=0.025, seed=8)
    pset, est = run_stream(config, [60.0] * 30)
    assert abs(est[-1, 0] - 60.0) <= 1e-3


def test_weight_sum_after_every_cycle():
    config = FilterConfig(n_particles=200, seed=10)
    rng = np.random.default_rng(1)
    pset = init_particles(config, 60.0, 0.1)
    for k in range(60):
        z = FrequencySample(t=(k + 1) / RATE, f_meas=60.0 + rng.normal(0, 0.158), seq=k)
        pset = propagate(pset, 1.0 / RATE, config)
        pset = update_weights(pset, z, config)
        assert abs(pset.w.sum() - 1.0) <= 1e-12
        pset = resample(pset)
        assert abs(pset.w.sum() - 1.0) <= 1e-12
        assert pset.n == 200


def test_noisy_constant_rmse_below_raw_sigma():
    config = FilterConfig(seed=14)
    rng = np.random.default_rng(2)
    meas = 60.0 + rng.normal(0, math.sqrt(0.025), size=300)
    _, est = run_stream(config, meas)
    rmse = float(np.sqrt(np.mean((est[:, 0] - 60.0) ** 2)))
    assert rmse < math.sqrt(0.025)


def test_ramp_fdot_tracking():
    # Monte Carlo: after 2 s of a -0.5 Hz/s ramp the mean rate estimate
    # across seeds settles within +-0.1 Hz/s of the true slope
    t = (np.arange(60) + 1) / RATE
    finals = []
    for seed in range(10):
        config = FilterConfig(seed=100 + seed)
        rng = np.random.default_rng(seed)
        meas = 60.0 - 0.5 * t + rng.normal(0, math.sqrt(0.025), size=60)
        _, est = run_stream(config, meas)
        finals.append(est[-1, 1])
    assert np.mean(finals) == pytest.approx(-0.5, abs=0.1)


def test_flat_likelihood_keeps_estimate_constant():
    # rm enormous: measurements carry no information, weights stay uniform
    config = FilterConfig(n_particles=100, q_f=0.0, q_fdot=0.0, rm=1e12, seed=16)
    pset = init_particles(config, 60.0, 0.1)
    before = estimate(pset)[0]
    for k in range(20):
        z = FrequencySample(t=(k + 1) / RATE, f_meas=50.0, seq=k)
        pset = update_weights(pset, z, config)
        assert np.allclose(pset.w, 1.0 / 100, atol=1e-9)
    assert estimate(pset)[0] == pytest.approx(before, abs=1e-6)


def test_fixed_seed_bit_identical_histories():
    config = FilterConfig(n_particles=300, seed=21)
    rng = np.random.default_rng(4)
    meas = list(60.0 + rng.normal(0, 0.158, size=90))
    pset_a, est_a = run_stream(config, meas)
    pset_b, est_b = run_stream(config, meas)
    assert np.array_equal(est_a, est_b)
    assert np.array_equal(pset_a.x, pset_b.x)


def test_particles_view():
    pset = make_set([[59.0, 0.0], [61.0, 1.0]], [0.25, 0.75])
    view = pset.particles
    assert len(view) == 2
    assert view[1].w == 0.75
    assert view[1].x.tolist() == [61.0, 1.0]
