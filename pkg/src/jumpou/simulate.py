"""Exact forward simulation of the superposed OU model.

The Gaussian component is sampled from its exact transition, jump
components from their driving marked Poisson processes (thinning for the
periodic rate).  Each component gets an independent child stream of the
master seed so individual pieces are reproducible in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ConstantIntensity,
    Intensity,
    MarkedPointProcess,
    ModelSpec,
    Params,
    PricePath,
    TimeGrid,
    intensity_eval,
    jump_ou_path,
    superpose,
)

__all__ = [
    "SimulationTruth",
    "sample_marked_poisson",
    "sample_gaussian_ou",
    "sample_model",
]


@dataclass(frozen=True)
class SimulationTruth:
    """Simulated data together with every latent quantity that produced it."""

    spec: ModelSpec
    params: Params
    grid: TimeGrid
    observed: np.ndarray
    components: tuple[np.ndarray, ...]  # Gaussian first, then jump components
    phis: tuple[MarkedPointProcess, ...]

    @property
    def path(self) -> PricePath:
        return PricePath(self.grid, self.observed, self.components)


def sample_marked_poisson(
    intensity: Intensity, beta: float, horizon: float, rng
) -> MarkedPointProcess:
    """Draw a marked point process on (0, horizon] with exponential marks.

    The constant rate is sampled directly; the periodic rate by thinning a
    homogeneous process at the maximum rate.
    """
    if beta <= 0 or horizon <= 0:
        raise ValueError("beta and horizon must be positive")
    rate = intensity.max_rate
    n = rng.poisson(rate * horizon)
    tau = np.sort(rng.uniform(0.0, horizon, size=n))
    if not isinstance(intensity, ConstantIntensity) and n:
        keep = rng.uniform(0.0, rate, size=n) < intensity_eval(intensity, tau)
        tau = tau[keep]
    xi = rng.exponential(beta, size=tau.size)
    return MarkedPointProcess(tau, xi, horizon)


def sample_gaussian_ou(
    grid: TimeGrid, mu: float, lam0: float, sigma2: float, rng, y0: float | None = None
) -> np.ndarray:
    """Exact path of the Gaussian OU component at the grid times.

    Starts from the stationary law N(mu, lam0 sigma2 / 2) unless ``y0``
    is given.
    """
    if lam0 <= 0 or sigma2 <= 0:
        raise ValueError("lam0 and sigma2 must be positive")
    y = np.empty(grid.t.size)
    if y0 is None:
        y[0] = rng.normal(mu, math.sqrt(lam0 * sigma2 / 2.0))
    else:
        y[0] = y0
    decay = np.exp(-grid.dt / lam0)
    sd = np.sqrt(lam0 * sigma2 * (1.0 - decay**2) / 2.0)
    eps = rng.standard_normal(grid.dt.size)
    for j in range(1, y.size):
        y[j] = mu + (y[j - 1] - mu) * decay[j - 1] + sd[j - 1] * eps[j - 1]
    return y


def sample_model(
    spec: ModelSpec, params: Params, grid: TimeGrid, seed: int | np.random.SeedSequence = 0
) -> SimulationTruth:
    if len(params.jumps) != spec.n:
        raise ValueError("params must carry one jump component per spec entry")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = seq.spawn(1 + spec.n)
    y0 = sample_gaussian_ou(
        grid, params.mu, params.lam0, params.sigma2, np.random.default_rng(streams[0])
    )
    components = [y0]
    phis = []
    for i, jp in enumerate(params.jumps):
        rng = np.random.default_rng(streams[1 + i])
        phi = sample_marked_poisson(jp.intensity, jp.beta, grid.horizon, rng)
        phis.append(phi)
        components.append(jump_ou_path(phi, jp.lam, grid))
    observed = superpose(components, (1,) + spec.signs)
    return SimulationTruth(
        spec=spec,
        params=params,
        grid=grid,
        observed=observed,
        components=tuple(components),
        phis=tuple(phis),
    )
