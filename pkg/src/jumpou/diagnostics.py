"""Posterior predictive checks, KS tests, mixing diagnostics, jump day map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov, ndtr

from .model import ConstantIntensity, ModelSpec, PricePath, jump_ou_path
from .simulate import sample_marked_poisson

__all__ = [
    "PpcReport",
    "residuals",
    "ks_one_sample",
    "ks_two_sample",
    "ppc",
    "acf",
    "jump_day_map",
]


def residuals(sample, data: PricePath, spec: ModelSpec | None = None) -> np.ndarray:
    """Standardised Gaussian OU innovations implied by one posterior sample.

    eps_j = (z_j - mu - (z_{j-1}-mu) e^{-Delta_j/lam0}) / Sigma_j with
    z = x - sum_i w_i y_i reconstructed from the sample's point processes.
    """
    spec = getattr(sample, "spec", spec)
    if spec is None:
        raise ValueError("model spec required")
    params = sample.params
    grid = data.grid
    z = data.values.copy()
    for phi, jp, w in zip(sample.phis, params.jumps, spec.signs):
        z -= w * jump_ou_path(phi, jp.lam, grid)
    lam0 = params.lam0
    e = params.rho0**grid.dt
    sd = np.sqrt(lam0 * params.sigma2 * (1.0 - e * e) / 2.0)
    return (z[1:] - params.mu - (z[:-1] - params.mu) * e) / sd


def ks_one_sample(data, cdf) -> tuple[float, float]:
    """One-sample KS statistic and finite-n approximate p-value.

    The p-value applies the Kolmogorov asymptotic law at
    (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.
    """
    x = np.sort(np.asarray(data, dtype=float))
    n = x.size
    if n < 1:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    grid = np.arange(1, n + 1) / n
    d = float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n))))
    sqrt_n = math.sqrt(n)
    p = float(kolmogorov((sqrt_n + 0.12 + 0.11 / sqrt_n) * d))
    return d, min(max(p, 0.0), 1.0)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample KS statistic with asymptotic p at effective size nm/(n+m)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    n, m = a.size, b.size
    if n == 0 or m == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / n
    cdf_b = np.searchsorted(b, pooled, side="right") / m
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    ne = n * m / (n + m)
    p = float(kolmogorov(math.sqrt(ne) * d))
    return d, min(max(p, 0.0), 1.0)


@dataclass(frozen=True)
class PpcReport:
    """Per-sample p-value vectors for the three checks and their means.

    Undefined entries (fewer than two jumps in a sample) are NaN; a check
    whose entries are all undefined has a NaN mean.
    """

    residual_p: np.ndarray
    jump_size_p: tuple[np.ndarray, ...]
    arrival_p: tuple[np.ndarray, ...]
    threshold: float = 0.1

    @property
    def residual_mean(self) -> float:
        return float(np.mean(self.residual_p))

    @property
    def jump_size_means(self) -> tuple[float, ...]:
        return tuple(_nanmean(p) for p in self.jump_size_p)

    @property
    def arrival_means(self) -> tuple[float, ...]:
        return tuple(_nanmean(p) for p in self.arrival_p)

    def p_values(self) -> dict[str, float]:
        out = {"residual": self.residual_mean}
        for i, (s, t) in enumerate(zip(self.jump_size_means, self.arrival_means), start=1):
            out[f"jump_sizes_{i}"] = s
            out[f"jump_times_{i}"] = t
        return out

    @property
    def adequate(self) -> bool:
        """True when every posterior predictive p-value is defined and at
        or above the threshold."""
        vals = list(self.p_values().values())
        return all(math.isfinite(v) and v >= self.threshold for v in vals)


def _nanmean(a: np.ndarray) -> float:
    a = a[np.isfinite(a)]
    return float(np.mean(a)) if a.size else math.nan


def ppc(data: PricePath, samples, spec: ModelSpec, threshold: float = 0.1, seed: int = 0) -> PpcReport:
    """Posterior predictive checks over a list of posterior samples.

    Per sample: (a) residuals vs N(0,1); (b) marks of each component vs
    Ex(beta); (c) inter-arrival times vs Ex(1/eta) for constant intensity,
    or a two-sample KS against a freshly simulated inhomogeneous process.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("at least one posterior sample required")
    rng_seq = np.random.SeedSequence(seed)
    res_p = np.empty(len(samples))
    size_p = [np.empty(len(samples)) for _ in range(spec.n)]
    arr_p = [np.empty(len(samples)) for _ in range(spec.n)]
    for k, sample in enumerate(samples):
        eps = residuals(sample, data, spec)
        res_p[k] = ks_one_sample(eps, ndtr)[1]
        for i in range(spec.n):
            phi = sample.phis[i]
            jp = sample.params.jumps[i]
            if phi.count < 2:
                size_p[i][k] = math.nan
                arr_p[i][k] = math.nan
                continue
            beta = jp.beta
            size_p[i][k] = ks_one_sample(phi.xi, lambda x: 1.0 - np.exp(-x / beta))[1]
            gaps = np.diff(phi.tau)
            if isinstance(jp.intensity, ConstantIntensity):
                eta = jp.intensity.eta
                arr_p[i][k] = ks_one_sample(gaps, lambda x: 1.0 - np.exp(-eta * x))[1]
            else:
                fresh = sample_marked_poisson(
                    jp.intensity, beta, phi.horizon, np.random.default_rng(rng_seq.spawn(1)[0])
                )
                if fresh.count < 2:
                    arr_p[i][k] = math.nan
                else:
                    arr_p[i][k] = ks_two_sample(gaps, np.diff(fresh.tau))[1]
    return PpcReport(
        residual_p=res_p,
        jump_size_p=tuple(size_p),
        arrival_p=tuple(arr_p),
        threshold=threshold,
    )


def acf(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelation with the biased normalisation, lags 0..max_lag."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if max_lag >= n:
        raise ValueError("max_lag must be below the series length")
    x = x - x.mean()
    c0 = float(x @ x) / n
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = (float(x[:-k] @ x[k:]) / n) / c0
    return out


def jump_day_map(samples, component: int, occupancy_threshold: float = 0.6) -> dict[int, float]:
    """Days where at least the threshold fraction of samples place a jump,
    mapped to the average (over qualifying samples) within-day summed mark."""
    samples = list(samples)
    if not samples:
        raise ValueError("at least one posterior sample required")
    day_sums: dict[int, list[float]] = {}
    for sample in samples:
        phi = sample.phis[component]
        if phi.count == 0:
            continue
        days = np.floor(phi.tau).astype(int)
        for d in np.unique(days):
            day_sums.setdefault(int(d), []).append(float(phi.xi[days == d].sum()))
    cutoff = occupancy_threshold * len(samples)
    return {
        d: float(np.mean(v)) for d, v in sorted(day_sums.items()) if len(v) >= cutoff
    }
