"""Core model primitives: grids, intensities, OU kernels, likelihood."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import jumpou as J


# ------------------------------------------------------------------ TimeGrid


def test_daily_grid():
    g = J.TimeGrid.daily(10)
    assert g.t.size == 11
    assert g.n == 10
    assert g.horizon == 10.0
    assert g.uniform


def test_grid_requires_zero_start():
    with pytest.raises(ValueError):
        J.TimeGrid(np.array([1.0, 2.0]))


def test_grid_rejects_nonincreasing():
    with pytest.raises(ValueError):
        J.TimeGrid(np.array([0.0, 2.0, 2.0]))


def test_nonuniform_grid_flag():
    g = J.TimeGrid(np.array([0.0, 1.0, 3.0, 3.5]))
    assert not g.uniform
    np.testing.assert_allclose(g.dt, [1.0, 2.0, 0.5])


# ------------------------------------------------------------- intensities


def test_constant_intensity_eval():
    I = J.ConstantIntensity(0.25)
    assert I.max_rate == 0.25
    np.testing.assert_allclose(J.intensity_eval(I, np.array([0.0, 5.0])), 0.25)


def test_periodic_intensity_shape():
    # rate = eta * (2/(1+|sin(pi (t-theta)/k)|) - 1)^delta peaks at t=theta
    I = J.PeriodicIntensity(eta=0.4, theta=88.0, delta=1.8, period=130.0)
    assert math.isclose(float(J.intensity_eval(I, 88.0)), 0.4)
    assert math.isclose(float(J.intensity_eval(I, 88.0 + 130.0)), 0.4)
    # zero where |sin| = 1
    assert float(J.intensity_eval(I, 88.0 + 65.0)) == pytest.approx(0.0, abs=1e-12)
    assert I.max_rate == 0.4


def test_periodic_intensity_direct_formula():
    I = J.PeriodicIntensity(eta=0.3, theta=10.0, delta=2.5, period=130.0)
    t = np.linspace(0.0, 400.0, 997)
    expected = 0.3 * (2.0 / (1.0 + np.abs(np.sin(np.pi * (t - 10.0) / 130.0))) - 1.0) ** 2.5
    np.testing.assert_allclose(J.intensity_eval(I, t), expected, rtol=1e-12)


def test_intensity_integral_constant():
    I = J.ConstantIntensity(0.2)
    assert J.intensity_integral(I, 3.0, 11.0) == pytest.approx(1.6)


def test_intensity_integral_vs_riemann():
    # in-test oracle: composite midpoint rule on a fine mesh
    I = J.PeriodicIntensity(eta=0.3, theta=88.0, delta=1.8, period=130.0)
    for a, b in [(0.0, 130.0), (12.3, 912.7), (88.0, 88.0), (400.0, 433.0)]:
        m = max(int((b - a) * 2000), 1)
        mid = a + (b - a) * (np.arange(m) + 0.5) / m
        ref = float(np.sum(J.intensity_eval(I, mid)) * (b - a) / m)
        assert J.intensity_integral(I, a, b) == pytest.approx(ref, abs=5e-5)


def test_intensity_integral_periodicity():
    I = J.PeriodicIntensity(eta=0.1, theta=40.0, delta=1.0, period=130.0)
    one = J.intensity_integral(I, 0.0, 130.0)
    assert J.intensity_integral(I, 0.0, 390.0) == pytest.approx(3 * one, rel=1e-9)
    assert J.intensity_integral(I, 17.0, 147.0) == pytest.approx(one, rel=1e-9)


@given(
    a=st.floats(0.0, 500.0),
    w1=st.floats(0.0, 300.0),
    w2=st.floats(0.0, 300.0),
)
@settings(max_examples=25, deadline=None)
def test_intensity_integral_additive(a, w1, w2):
    I = J.PeriodicIntensity(eta=0.2, theta=30.0, delta=1.3, period=130.0)
    whole = J.intensity_integral(I, a, a + w1 + w2)
    parts = J.intensity_integral(I, a, a + w1) + J.intensity_integral(I, a + w1, a + w1 + w2)
    assert whole == pytest.approx(parts, rel=1e-7, abs=1e-9)


# -------------------------------------------------------- marked point sets


def test_mpp_sorted_and_readonly():
    phi = J.MarkedPointProcess(np.array([3.0, 1.0]), np.array([0.5, 0.2]), 10.0)
    np.testing.assert_allclose(phi.tau, [1.0, 3.0])
    np.testing.assert_allclose(phi.xi, [0.2, 0.5])
    with pytest.raises(ValueError):
        phi.tau[0] = 5.0


def test_mpp_editing():
    phi = J.MarkedPointProcess.empty(10.0)
    assert phi.count == 0
    phi = phi.with_point(4.0, 1.0).with_point(2.0, 0.3)
    assert phi.count == 2
    assert phi.without_point(0).count == 1
    np.testing.assert_allclose(phi.with_marks(np.array([1.0, 2.0])).xi, [1.0, 2.0])


def test_mpp_rejects_bad_points():
    with pytest.raises(ValueError):
        J.MarkedPointProcess(np.array([11.0]), np.array([1.0]), 10.0)
    with pytest.raises(ValueError):
        J.MarkedPointProcess(np.array([5.0]), np.array([-1.0]), 10.0)


# ------------------------------------------------------------- OU kernels


def test_gaussian_ou_moments_formula():
    # exact transition: mean mu + (y-mu)e^{-s/lam}, var lam sigma^2 (1-e^{-2s/lam})/2
    mean, var = J.gaussian_ou_moments(y=2.0, s=3.0, mu=1.0, lam0=8.0, sigma2=0.01)
    e = math.exp(-3.0 / 8.0)
    assert mean == pytest.approx(1.0 + 1.0 * e)
    assert var == pytest.approx(8.0 * 0.01 * (1 - e * e) / 2.0)


def test_gaussian_ou_moments_limits():
    mean, var = J.gaussian_ou_moments(y=5.0, s=0.0, mu=1.0, lam0=8.0, sigma2=0.01)
    assert mean == 5.0 and var == 0.0
    mean, var = J.gaussian_ou_moments(y=5.0, s=1e9, mu=1.0, lam0=8.0, sigma2=0.01)
    assert mean == pytest.approx(1.0)
    assert var == pytest.approx(8.0 * 0.01 / 2.0)  # stationary variance


def _brute_jump_path(phi, lam, grid):
    out = np.zeros_like(grid.t)
    for k, t in enumerate(grid.t):
        for tau, xi in zip(phi.tau, phi.xi):
            if tau <= t:
                out[k] += xi * math.exp(-(t - tau) / lam)
    return out


def test_jump_ou_path_vs_bruteforce():
    rng = np.random.default_rng(3)
    grid = J.TimeGrid.daily(40)
    phi = J.MarkedPointProcess(
        rng.uniform(0, 40, size=17), rng.exponential(0.7, size=17), 40.0
    )
    fast = J.jump_ou_path(phi, 2.0, grid)
    np.testing.assert_allclose(fast, _brute_jump_path(phi, 2.0, grid), rtol=1e-10)


def test_jump_ou_path_nonuniform_grid():
    rng = np.random.default_rng(4)
    t = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 20.0, size=30))])
    grid = J.TimeGrid(t)
    phi = J.MarkedPointProcess(
        rng.uniform(0, grid.horizon, size=9), rng.exponential(1.0, size=9), grid.horizon
    )
    fast = J.jump_ou_path(phi, 1.3, grid)
    np.testing.assert_allclose(fast, _brute_jump_path(phi, 1.3, grid), rtol=1e-10)


def test_jump_ou_path_empty():
    grid = J.TimeGrid.daily(5)
    phi = J.MarkedPointProcess.empty(5.0)
    np.testing.assert_array_equal(J.jump_ou_path(phi, 2.0, grid), np.zeros(6))


@given(lam=st.floats(0.1, 20.0), n=st.integers(0, 12))
@settings(max_examples=30, deadline=None)
def test_jump_ou_path_nonnegative_and_jump_dominated(lam, n):
    rng = np.random.default_rng(n + 1)
    grid = J.TimeGrid.daily(30)
    if n == 0:
        phi = J.MarkedPointProcess.empty(30.0)
    else:
        phi = J.MarkedPointProcess(
            rng.uniform(0, 30, size=n), rng.exponential(1.0, size=n), 30.0
        )
    y = J.jump_ou_path(phi, lam, grid)
    assert np.all(y >= -1e-12)
    assert np.all(y <= phi.xi.sum() + 1e-12)


def test_superpose_signs():
    a = np.array([1.0, 2.0])
    b = np.array([0.5, 0.5])
    np.testing.assert_allclose(J.superpose([a, b], (1, -1)), [0.5, 1.5])


def test_superpose_shape_mismatch():
    with pytest.raises(ValueError):
        J.superpose([np.zeros(3), np.zeros(4)], (1, 1))


# -------------------------------------------------------------- likelihood


def test_gaussian_transition_loglik_vs_normal_logpdf(small_grid, rng):
    from scipy.stats import norm

    z = rng.normal(1.0, 0.2, size=small_grid.t.size)
    mu, rho0, sigma2 = 1.0, 0.88, 0.01
    lam0 = -1.0 / math.log(rho0)
    ref = 0.0
    for j in range(1, z.size):
        m, v = J.gaussian_ou_moments(z[j - 1], float(small_grid.dt[j - 1]), mu, lam0, sigma2)
        ref += norm.logpdf(z[j], m, math.sqrt(v))
    val = J.log_likelihood_obs(
        J.PricePath(small_grid, z),
        J.Params(mu=mu, sigma2=sigma2, rho0=rho0, jumps=()),
        [],
    )
    assert val == pytest.approx(ref, rel=1e-10)


def test_log_likelihood_subtracts_signed_paths(small_grid, rng, one_jump_params):
    x = rng.normal(1.0, 0.2, size=small_grid.t.size)
    y = rng.exponential(0.5, size=small_grid.t.size)
    plus = J.log_likelihood_obs(
        J.PricePath(small_grid, x), one_jump_params, [y], signs=(1,)
    )
    same = J.log_likelihood_obs(
        J.PricePath(small_grid, x - y),
        one_jump_params,
        [np.zeros_like(y)],
        signs=(1,),
    )
    assert plus == pytest.approx(same, rel=1e-12)


def test_model_spec_ordering_pairs():
    spec = J.ModelSpec(
        (J.ComponentSpec(sign=1), J.ComponentSpec(sign=1), J.ComponentSpec(sign=-1))
    )
    assert spec.ordering_pairs == ((0, 1),)
    assert spec.signs == (1, 1, -1)


def test_model_spec_rejects_interleaved_signs():
    with pytest.raises(ValueError):
        J.ModelSpec(
            (J.ComponentSpec(sign=1), J.ComponentSpec(sign=-1), J.ComponentSpec(sign=1))
        )


def test_params_ordering_check():
    spec = J.ModelSpec((J.ComponentSpec(sign=1), J.ComponentSpec(sign=1)))
    mk = lambda r1, r2: J.Params(
        mu=1.0,
        sigma2=0.01,
        rho0=0.9,
        jumps=(
            J.JumpParams(rho=r1, beta=0.7, intensity=J.ConstantIntensity(0.1)),
            J.JumpParams(rho=r2, beta=0.7, intensity=J.ConstantIntensity(0.1)),
        ),
    )
    assert mk(0.8, 0.5).satisfies_ordering(spec)
    assert not mk(0.5, 0.8).satisfies_ordering(spec)
