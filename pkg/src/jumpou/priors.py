"""Prior families, densities, sampling, and the ordered joint prior on rho.

Same-sign jump pairs carry the identifiability constraint rho_{i+1} < rho_i,
imposed through the conditional prior rho_{i+1} | rho_i ~ rho_i * U(0,1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ConstantIntensity, JumpParams, ModelSpec, Params, PeriodicIntensity

__all__ = [
    "NormalPrior",
    "InverseGammaPrior",
    "GammaPrior",
    "UniformPrior",
    "FlatPositivePrior",
    "ComponentPriors",
    "PriorSpec",
    "default_priors",
    "log_prior",
    "sample_prior",
]

NEG_INF = float("-inf")


@dataclass(frozen=True)
class NormalPrior:
    mean: float
    sd: float

    def logpdf(self, x: float) -> float:
        return -0.5 * math.log(2 * math.pi * self.sd**2) - (x - self.mean) ** 2 / (
            2 * self.sd**2
        )

    def sample(self, rng) -> float:
        return float(rng.normal(self.mean, self.sd))

    def moments(self):
        return self.mean, self.sd


@dataclass(frozen=True)
class InverseGammaPrior:
    a: float
    b: float

    def logpdf(self, x: float) -> float:
        if x <= 0:
            return NEG_INF
        return self.a * math.log(self.b) - math.lgamma(self.a) - (self.a + 1) * math.log(x) - self.b / x

    def sample(self, rng) -> float:
        return float(self.b / rng.gamma(self.a))

    def moments(self):
        """(mean, sd); entries are nan when the moment does not exist."""
        mean = self.b / (self.a - 1) if self.a > 1 else math.nan
        if self.a > 2:
            sd = math.sqrt(self.b**2 / ((self.a - 1) ** 2 * (self.a - 2)))
        else:
            sd = math.nan
        return mean, sd


@dataclass(frozen=True)
class GammaPrior:
    """Ga(a, b) with mean a/b (rate parametrisation)."""

    a: float
    b: float

    def logpdf(self, x: float) -> float:
        if x <= 0:
            return NEG_INF
        return self.a * math.log(self.b) - math.lgamma(self.a) + (self.a - 1) * math.log(x) - self.b * x

    def sample(self, rng) -> float:
        return float(rng.gamma(self.a) / self.b)

    def moments(self):
        return self.a / self.b, math.sqrt(self.a) / self.b


@dataclass(frozen=True)
class UniformPrior:
    lo: float
    hi: float

    def logpdf(self, x: float) -> float:
        if not self.lo < x < self.hi:
            return NEG_INF
        return -math.log(self.hi - self.lo)

    def sample(self, rng) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def moments(self):
        w = self.hi - self.lo
        return (self.lo + self.hi) / 2, w / math.sqrt(12.0)


@dataclass(frozen=True)
class FlatPositivePrior:
    """Improper flat prior on (0, inf); density constant, not samplable."""

    def logpdf(self, x: float) -> float:
        return 0.0 if x > 0 else NEG_INF

    def sample(self, rng):
        raise ValueError("improper prior cannot be sampled")

    def moments(self):
        return math.nan, math.nan


@dataclass(frozen=True)
class ComponentPriors:
    rho: UniformPrior
    beta: InverseGammaPrior
    eta: GammaPrior | FlatPositivePrior
    theta: UniformPrior | None = None
    delta: GammaPrior | None = None


@dataclass(frozen=True)
class PriorSpec:
    mu: NormalPrior
    sigma2: InverseGammaPrior
    rho0: UniformPrior
    components: tuple[ComponentPriors, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def proper(self) -> bool:
        return not any(isinstance(c.eta, FlatPositivePrior) for c in self.components)


def default_priors(spec: ModelSpec) -> PriorSpec:
    """Wide defaults: N(1, 20^2), IG(1.5, 0.005), U(0,1), Ga(1,10), IG(1,1);
    periodic components additionally U(65,195) for theta and Ga(1,10) for delta."""
    comps = []
    for c in spec.components:
        comps.append(
            ComponentPriors(
                rho=UniformPrior(0.0, 1.0),
                beta=InverseGammaPrior(1.0, 1.0),
                eta=GammaPrior(1.0, 10.0),
                theta=UniformPrior(65.0, 195.0) if c.periodic else None,
                delta=GammaPrior(1.0, 10.0) if c.periodic else None,
            )
        )
    return PriorSpec(
        mu=NormalPrior(1.0, 20.0),
        sigma2=InverseGammaPrior(1.5, 0.005),
        rho0=UniformPrior(0.0, 1.0),
        components=tuple(comps),
    )


def _followers(spec: ModelSpec) -> set[int]:
    return {j for _, j in spec.ordering_pairs}


def log_prior(params: Params, priors: PriorSpec, spec: ModelSpec) -> float:
    """Joint log prior density; -inf outside the support or ordering region."""
    if len(params.jumps) != len(priors.components) or len(params.jumps) != spec.n:
        raise ValueError("params, priors and spec must agree on component count")
    total = priors.mu.logpdf(params.mu)
    total += priors.sigma2.logpdf(params.sigma2)
    total += priors.rho0.logpdf(params.rho0)
    followers = _followers(spec)
    for i, (jp, cp) in enumerate(zip(params.jumps, priors.components)):
        if i in followers:
            # rho_i | rho_{i-1} ~ rho_{i-1} U(0,1)
            prev = params.jumps[i - 1].rho
            if not 0.0 < jp.rho < prev:
                return NEG_INF
            total += -math.log(prev)
        else:
            total += cp.rho.logpdf(jp.rho)
        total += cp.beta.logpdf(jp.beta)
        total += cp.eta.logpdf(jp.intensity.eta)
        if isinstance(jp.intensity, PeriodicIntensity):
            if cp.theta is None or cp.delta is None:
                raise ValueError("periodic component requires theta and delta priors")
            total += cp.theta.logpdf(jp.intensity.theta)
            total += cp.delta.logpdf(jp.intensity.delta)
        if not math.isfinite(total):
            return NEG_INF
    return total


def sample_prior(priors: PriorSpec, spec: ModelSpec, rng=None) -> Params:
    """Draw parameters from the prior, respecting ordering constraints."""
    if not priors.proper:
        raise ValueError("cannot sample from an improper prior")
    rng = np.random.default_rng(rng)
    followers = _followers(spec)
    jumps = []
    for i, (cs, cp) in enumerate(zip(spec.components, priors.components)):
        if i in followers:
            rho = jumps[-1].rho * rng.uniform()
            while rho <= 0.0:  # boundary draws have probability zero
                rho = jumps[-1].rho * rng.uniform()
        else:
            rho = cp.rho.sample(rng)
            while not 0.0 < rho < 1.0:
                rho = cp.rho.sample(rng)
        beta = cp.beta.sample(rng)
        eta = cp.eta.sample(rng)
        if cs.periodic:
            intensity = PeriodicIntensity(
                eta=eta, theta=cp.theta.sample(rng), delta=cp.delta.sample(rng), period=cs.period
            )
        else:
            intensity = ConstantIntensity(eta)
        jumps.append(JumpParams(rho=rho, beta=beta, intensity=intensity))
    return Params(
        mu=priors.mu.sample(rng),
        sigma2=priors.sigma2.sample(rng),
        rho0=priors.rho0.sample(rng),
        jumps=tuple(jumps),
    )
