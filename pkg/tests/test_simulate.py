"""Forward simulation: reproducibility and distributional sanity."""

import numpy as np
import pytest

import jumpou as J


def test_seed_reproducibility(one_jump_spec, one_jump_params):
    grid = J.TimeGrid.daily(200)
    a = J.sample_model(one_jump_spec, one_jump_params, grid, seed=9)
    b = J.sample_model(one_jump_spec, one_jump_params, grid, seed=9)
    np.testing.assert_array_equal(a.observed, b.observed)
    np.testing.assert_array_equal(a.phis[0].tau, b.phis[0].tau)
    c = J.sample_model(one_jump_spec, one_jump_params, grid, seed=10)
    assert not np.array_equal(a.observed, c.observed)


def test_truth_decomposition_consistent(one_jump_spec, one_jump_params):
    grid = J.TimeGrid.daily(100)
    truth = J.sample_model(one_jump_spec, one_jump_params, grid, seed=2)
    np.testing.assert_allclose(
        truth.observed, truth.components[0] + truth.components[1], rtol=1e-12
    )
    np.testing.assert_allclose(
        truth.components[1],
        J.jump_ou_path(truth.phis[0], one_jump_params.jumps[0].lam, grid),
        rtol=1e-12,
    )


def test_gaussian_ou_stationary_moments(rng):
    grid = J.TimeGrid.daily(20000)
    y = J.sample_gaussian_ou(grid, mu=1.0, lam0=8.0, sigma2=0.01, rng=rng)
    assert y.mean() == pytest.approx(1.0, abs=0.02)
    assert y.var() == pytest.approx(8.0 * 0.01 / 2.0, rel=0.1)


def test_gaussian_ou_fixed_start(rng):
    grid = J.TimeGrid.daily(10)
    y = J.sample_gaussian_ou(grid, mu=0.0, lam0=5.0, sigma2=0.02, rng=rng, y0=3.0)
    assert y[0] == 3.0


def test_marked_poisson_constant_counts():
    counts = [
        J.sample_marked_poisson(
            J.ConstantIntensity(0.1), 0.7, 1000.0, np.random.default_rng(k)
        ).count
        for k in range(300)
    ]
    assert np.mean(counts) == pytest.approx(100.0, rel=0.05)
    assert np.var(counts) == pytest.approx(100.0, rel=0.25)


def test_marked_poisson_mark_mean():
    phi = J.sample_marked_poisson(
        J.ConstantIntensity(2.0), 0.7, 5000.0, np.random.default_rng(0)
    )
    assert phi.xi.mean() == pytest.approx(0.7, rel=0.05)


def test_marked_poisson_periodic_thinning():
    I = J.PeriodicIntensity(eta=0.3, theta=88.0, delta=1.8, period=130.0)
    taus = np.concatenate(
        [
            J.sample_marked_poisson(I, 0.7, 520.0, np.random.default_rng(k)).tau
            for k in range(400)
        ]
    )
    expected = J.intensity_integral(I, 0.0, 520.0)
    assert taus.size / 400 == pytest.approx(expected, rel=0.05)
    # arrivals concentrate around the peaks theta + m*period
    frac_near_peak = np.mean(np.abs(((taus - 88.0) % 130.0 + 65.0) % 130.0 - 65.0) < 20.0)
    assert frac_near_peak > 0.7


def test_signed_component_subtracts():
    spec = J.ModelSpec((J.ComponentSpec(sign=-1),))
    params = J.Params(
        mu=0.0,
        sigma2=0.0001,
        rho0=0.9,
        jumps=(J.JumpParams(rho=0.6, beta=5.0, intensity=J.ConstantIntensity(0.5)),),
    )
    truth = J.sample_model(spec, params, J.TimeGrid.daily(500), seed=1)
    # big negative jumps dominate the tiny diffusion
    assert truth.observed.min() < -1.0


def test_sample_model_rejects_mismatched_params(one_jump_params):
    spec = J.ModelSpec((J.ComponentSpec(sign=1), J.ComponentSpec(sign=1)))
    with pytest.raises(ValueError):
        J.sample_model(spec, one_jump_params, J.TimeGrid.daily(10), seed=0)
