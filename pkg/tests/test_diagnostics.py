"""KS machinery, residual whitening, posterior predictive checks."""

import numpy as np
import pytest
from scipy import stats as ss

import jumpou as J
from jumpou.diagnostics import residuals


def test_ks_one_sample_matches_scipy(rng):
    x = rng.normal(size=200)
    d, p = J.ks_one_sample(x, lambda v: ss.norm.cdf(v))
    d_ref, p_ref = ss.kstest(x, "norm")
    assert d == pytest.approx(d_ref, rel=1e-9)
    assert p == pytest.approx(p_ref, rel=0.02)


def test_ks_one_sample_detects_shift(rng):
    x = rng.normal(1.0, 1.0, size=500)
    _, p = J.ks_one_sample(x, lambda v: ss.norm.cdf(v))
    assert p < 1e-6


def test_ks_two_sample_matches_scipy(rng):
    a = rng.normal(size=150)
    b = rng.normal(size=220)
    d, p = J.ks_two_sample(a, b)
    ref = ss.ks_2samp(a, b, method="asymp")
    assert d == pytest.approx(ref.statistic, rel=1e-9)
    assert p == pytest.approx(ref.pvalue, rel=0.1)


def test_ks_two_sample_detects_difference(rng):
    a = rng.normal(size=400)
    b = rng.normal(0.6, 1.0, size=400)
    _, p = J.ks_two_sample(a, b)
    assert p < 1e-4


def test_residuals_whiten_at_truth(one_jump_spec, one_jump_params):
    grid = J.TimeGrid.daily(2000)
    truth = J.sample_model(one_jump_spec, one_jump_params, grid, seed=11)
    data = J.PricePath(grid, truth.observed)
    sample = J.PosteriorSample(one_jump_params, truth.phis)
    eps = residuals(sample, data, one_jump_spec)
    assert eps.size == grid.n
    assert eps.mean() == pytest.approx(0.0, abs=0.05)
    assert eps.std() == pytest.approx(1.0, rel=0.05)
    _, p = J.ks_one_sample(eps, lambda v: ss.norm.cdf(v))
    assert p > 0.01


def test_residuals_fail_with_wrong_latents(one_jump_spec, one_jump_params):
    grid = J.TimeGrid.daily(2000)
    truth = J.sample_model(one_jump_spec, one_jump_params, grid, seed=11)
    data = J.PricePath(grid, truth.observed)
    # pretend no jumps happened: the un-subtracted spikes break normality
    sample = J.PosteriorSample(
        one_jump_params, (J.MarkedPointProcess.empty(grid.horizon),)
    )
    eps = residuals(sample, data, one_jump_spec)
    _, p = J.ks_one_sample(eps, lambda v: ss.norm.cdf(v))
    assert p < 1e-6


def test_acf_white_noise(rng):
    x = rng.normal(size=20000)
    a = J.acf(x, max_lag=20)
    assert a[0] == pytest.approx(1.0)
    assert np.all(np.abs(a[1:]) < 0.05)


def test_acf_ar1():
    rng = np.random.default_rng(0)
    phi = 0.8
    x = np.empty(50000)
    x[0] = 0.0
    eps = rng.standard_normal(x.size)
    for j in range(1, x.size):
        x[j] = phi * x[j - 1] + eps[j]
    a = J.acf(x, max_lag=5)
    for k in range(1, 6):
        assert a[k] == pytest.approx(phi**k, abs=0.03)


def test_ppc_report_aggregation():
    rep = J.PpcReport(
        residual_p=np.array([0.3, 0.5]),
        jump_size_p=(np.array([0.4, np.nan]),),
        arrival_p=(np.array([0.2, 0.6]),),
        threshold=0.1,
    )
    assert rep.residual_mean == pytest.approx(0.4)
    assert rep.jump_size_means[0] == pytest.approx(0.4)  # NaN entries skipped
    assert rep.arrival_means[0] == pytest.approx(0.4)
    assert rep.adequate
    pv = rep.p_values()
    assert set(pv) == {"residual", "jump_sizes_1", "jump_times_1"}


def test_ppc_report_undefined_check_is_inadequate():
    rep = J.PpcReport(
        residual_p=np.array([0.5]),
        jump_size_p=(np.array([np.nan]),),
        arrival_p=(np.array([0.5]),),
        threshold=0.1,
    )
    assert not rep.adequate


def test_ppc_runs_on_posterior_samples(one_jump_spec, one_jump_params):
    grid = J.TimeGrid.daily(400)
    truth = J.sample_model(one_jump_spec, one_jump_params, grid, seed=23)
    data = J.PricePath(grid, truth.observed)
    samples = [J.PosteriorSample(one_jump_params, truth.phis) for _ in range(5)]
    rep = J.ppc(data, samples, one_jump_spec, seed=0)
    assert rep.residual_p.shape == (5,)
    assert len(rep.jump_size_p) == 1
    assert np.all((rep.residual_p >= 0) & (rep.residual_p <= 1))
    # the generating latent state should look adequate
    assert rep.residual_mean > 0.05


def test_jump_day_map(one_jump_params):
    phis = [
        J.MarkedPointProcess(np.array([3.2, 10.7]), np.array([0.5, 1.0]), 20.0),
        J.MarkedPointProcess(np.array([3.9]), np.array([0.7]), 20.0),
        J.MarkedPointProcess(np.array([15.1]), np.array([0.2]), 20.0),
    ]
    samples = [J.PosteriorSample(one_jump_params, (phi,)) for phi in phis]
    m = J.jump_day_map(samples, component=0, occupancy_threshold=0.6)
    # day 3 occupied in 2/3 samples >= 0.6 -> kept; days 10 and 15 in 1/3 -> dropped
    assert set(m) == {3}
    assert m[3] == pytest.approx((0.5 + 0.7) / 2)
