"""Core model types and exact transition mathematics.

The deseasonalised price is a signed sum of one Gaussian OU process and n
jump OU processes, each driven by a compound Poisson process with
exponential jump sizes and either a constant or a periodic arrival
intensity.  Everything here is a pure function over immutable value types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "TimeGrid",
    "ComponentSpec",
    "ModelSpec",
    "ConstantIntensity",
    "PeriodicIntensity",
    "JumpParams",
    "Params",
    "MarkedPointProcess",
    "PricePath",
    "gaussian_ou_moments",
    "jump_ou_path",
    "superpose",
    "intensity_eval",
    "intensity_integral",
    "log_likelihood_obs",
    "gaussian_transition_loglik",
]


def _as_readonly(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out = out.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing observation times t_0..t_N with t_0 = 0 (days)."""

    t: np.ndarray
    dt: np.ndarray = field(init=False, repr=False)
    uniform: bool = field(init=False, repr=False)

    def __post_init__(self):
        t = _as_readonly(self.t)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("grid must be a 1-d array of times")
        if t[0] != 0.0:
            raise ValueError("grid must start at t=0")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ValueError("observation times must be strictly increasing")
        dt = _as_readonly(dt)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "dt", dt)
        uniform = dt.size == 0 or bool(np.all(np.abs(dt - dt[0]) < 1e-12))
        object.__setattr__(self, "uniform", uniform)

    @classmethod
    def daily(cls, n_obs: int) -> "TimeGrid":
        """Grid of n_obs+1 daily observations 0, 1, ..., n_obs."""
        return cls(np.arange(n_obs + 1, dtype=float))

    @property
    def n(self) -> int:
        """Number of increments N."""
        return self.t.size - 1

    @property
    def horizon(self) -> float:
        return float(self.t[-1])


@dataclass(frozen=True)
class ComponentSpec:
    """One jump component: its sign and intensity kind.

    ``period=None`` means constant intensity; otherwise the intensity is
    periodic with the given period in days.
    """

    sign: int
    period: float | None = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.period is not None and self.period <= 0:
            raise ValueError("period must be positive")

    @property
    def periodic(self) -> bool:
        return self.period is not None


@dataclass(frozen=True)
class ModelSpec:
    """Number, signs and intensity kinds of the jump components.

    Components sharing a sign must be adjacent; each adjacent same-sign
    pair carries the identifiability ordering rho_{i+1} < rho_i.
    """

    components: tuple[ComponentSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        signs = [c.sign for c in self.components]
        # same-sign components must form contiguous blocks
        for s in (1, -1):
            idx = [i for i, v in enumerate(signs) if v == s]
            if idx and idx != list(range(idx[0], idx[0] + len(idx))):
                raise ValueError("same-sign components must be adjacent")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(c.sign for c in self.components)

    @property
    def ordering_pairs(self) -> tuple[tuple[int, int], ...]:
        """Adjacent index pairs (i, i+1) constrained to rho_{i+1} < rho_i."""
        pairs = []
        for i in range(self.n - 1):
            if self.components[i].sign == self.components[i + 1].sign:
                pairs.append((i, i + 1))
        return tuple(pairs)

    @property
    def ordered(self) -> bool:
        return bool(self.ordering_pairs)

    def describe(self) -> str:
        if self.n == 0:
            return "1-OU"
        parts = []
        for i, c in enumerate(self.components):
            tag = "+" if c.sign > 0 else "-"
            if c.periodic:
                tag += f"I(k={c.period:g})"
            parts.append(tag)
        return f"{self.n + 1}-OU[{','.join(parts)}]"


@dataclass(frozen=True)
class ConstantIntensity:
    """Constant jump arrival rate eta (per day)."""

    eta: float

    def __post_init__(self):
        if not math.isfinite(self.eta) or self.eta < 0:
            raise ValueError("eta must be finite and non-negative")

    @property
    def max_rate(self) -> float:
        return self.eta


@dataclass(frozen=True)
class PeriodicIntensity:
    """Periodic rate eta * [2/(1+|sin(pi(t-theta)/k)|) - 1]^delta."""

    eta: float
    theta: float
    delta: float
    period: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.eta, self.theta, self.delta, self.period))):
            raise ValueError("intensity parameters must be finite")
        if self.eta < 0 or self.delta <= 0 or self.period <= 0:
            raise ValueError("invalid periodic intensity parameters")

    @property
    def max_rate(self) -> float:
        return self.eta


Intensity = ConstantIntensity | PeriodicIntensity


def intensity_eval(theta: Intensity, t):
    """Arrival rate at time(s) t; lies in [0, eta]."""
    if isinstance(theta, ConstantIntensity):
        return np.broadcast_to(float(theta.eta), np.shape(t)).copy() if np.ndim(t) else theta.eta
    s = np.abs(np.sin(np.pi * (np.asarray(t, dtype=float) - theta.theta) / theta.period))
    out = theta.eta * (2.0 / (1.0 + s) - 1.0) ** theta.delta
    return out if np.ndim(t) else float(out)


def _simpson(f, a, b, fa, fm, fb):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive_simpson(f, a, b, tol, max_depth=20):
    """Adaptive Simpson quadrature, refined until halvings agree."""
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = _simpson(f, a, b, fa, fm, fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = _simpson(f, a, m, fa, flm, fm)
        right = _simpson(f, m, b, fm, frm, fb)
        # near-cusp shapes (delta well below 1) exhaust the depth budget on
        # vanishingly small panels; the extrapolated estimate is then already
        # far more accurate than anything the chain can resolve
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2.0, depth + 1
        )

    if a == b:
        return 0.0
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def _periodic_partial_integral(theta: PeriodicIntensity, r: float, tol: float) -> float:
    """Integral of the periodic rate over [theta, theta + r] with r in [0, k].

    The rate, as a function of u = t - theta, has period k, kinks at
    u = 0, k and a zero at u = k/2; panels are split there.
    """
    k = theta.period
    f = lambda u: intensity_eval(theta, theta.theta + u)
    if r <= 0:
        return 0.0
    if r <= k / 2:
        return _adaptive_simpson(f, 0.0, r, tol)
    return _adaptive_simpson(f, 0.0, k / 2, tol / 2) + _adaptive_simpson(f, k / 2, r, tol / 2)


def intensity_integral(theta: Intensity, t0: float, t1: float, tol: float = 1e-8) -> float:
    """Expected jump count over [t0, t1]."""
    if t0 > t1:
        raise ValueError("t0 must not exceed t1")
    if isinstance(theta, ConstantIntensity):
        return theta.eta * (t1 - t0)
    if theta.eta == 0.0 or t0 == t1:
        return 0.0
    k = theta.period
    period_mass = _periodic_partial_integral(theta, k, tol)

    def antider(t: float) -> float:
        # integral from theta (a kink of the rate) up to t, by periodicity
        u = t - theta.theta
        m = math.floor(u / k)
        return m * period_mass + _periodic_partial_integral(theta, u - m * k, tol)

    return antider(t1) - antider(t0)


@dataclass(frozen=True)
class JumpParams:
    """Parameters of one jump OU component."""

    rho: float
    beta: float
    intensity: Intensity

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @property
    def lam(self) -> float:
        """Mean reversion time scale, a derived view of rho = exp(-1/lam)."""
        return -1.0 / math.log(self.rho)


@dataclass(frozen=True)
class Params:
    """Full parameter state of the (n+1)-OU model."""

    mu: float
    sigma2: float
    rho0: float
    jumps: tuple[JumpParams, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple(self.jumps))
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if not 0.0 < self.rho0 < 1.0:
            raise ValueError("rho0 must lie in (0, 1)")

    @property
    def lam0(self) -> float:
        return -1.0 / math.log(self.rho0)

    def replace(self, **kw) -> "Params":
        from dataclasses import replace

        return replace(self, **kw)

    def satisfies_ordering(self, spec: ModelSpec) -> bool:
        return all(self.jumps[j].rho < self.jumps[i].rho for i, j in spec.ordering_pairs)


@dataclass(frozen=True)
class MarkedPointProcess:
    """Ordered jump times tau_j in [0, T] with positive marks xi_j."""

    tau: np.ndarray
    xi: np.ndarray
    horizon: float

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if tau.shape != xi.shape or tau.ndim != 1:
            raise ValueError("tau and xi must be 1-d arrays of equal length")
        order = np.argsort(tau, kind="stable")
        tau, xi = tau[order], xi[order]
        if tau.size and (tau[0] < 0 or tau[-1] > self.horizon):
            raise ValueError("jump times must lie in [0, T]")
        if np.any(xi <= 0):
            raise ValueError("marks must be positive")
        object.__setattr__(self, "tau", _as_readonly(tau))
        object.__setattr__(self, "xi", _as_readonly(xi))

    @classmethod
    def empty(cls, horizon: float) -> "MarkedPointProcess":
        return cls(np.empty(0), np.empty(0), horizon)

    @property
    def count(self) -> int:
        return self.tau.size

    def with_point(self, tau: float, xi: float) -> "MarkedPointProcess":
        return MarkedPointProcess(
            np.append(self.tau, tau), np.append(self.xi, xi), self.horizon
        )

    def without_point(self, j: int) -> "MarkedPointProcess":
        return MarkedPointProcess(
            np.delete(self.tau, j), np.delete(self.xi, j), self.horizon
        )

    def with_marks(self, xi: np.ndarray) -> "MarkedPointProcess":
        return MarkedPointProcess(self.tau.copy(), xi, self.horizon)


@dataclass(frozen=True)
class PricePath:
    """Observed series on a grid, optionally with its latent decomposition."""

    grid: TimeGrid
    values: np.ndarray
    components: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        values = _as_readonly(self.values)
        if values.shape != self.grid.t.shape:
            raise ValueError("values must match the grid length")
        object.__setattr__(self, "values", values)
        if self.components is not None:
            comps = tuple(_as_readonly(c) for c in self.components)
            for c in comps:
                if c.shape != values.shape:
                    raise ValueError("decomposition series must match the grid")
            object.__setattr__(self, "components", comps)


def gaussian_ou_moments(y: float, s: float, mu: float, lam0: float, sigma2: float):
    """Exact conditional mean and variance of the Gaussian OU transition."""
    if not all(map(math.isfinite, (y, s, mu, lam0, sigma2))):
        raise ValueError("inputs must be finite")
    if s < 0 or lam0 <= 0 or sigma2 <= 0:
        raise ValueError("require s >= 0, lam0 > 0, sigma2 > 0")
    decay = math.exp(-s / lam0)
    mean = mu + (y - mu) * decay
    var = lam0 * sigma2 * (1.0 - decay * decay) / 2.0
    return mean, var


def jump_ou_path(phi: MarkedPointProcess, lam: float, grid: TimeGrid) -> np.ndarray:
    """Jump OU component at grid times: sum_{tau_j <= t} exp(-(t-tau_j)/lam) xi_j.

    Right-continuous: a jump at a grid time is included at that time.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    t = grid.t
    if phi.count == 0:
        return np.zeros_like(t)
    idx = np.searchsorted(t, phi.tau, side="left")
    # decay each jump to the first grid point at or after its arrival
    b = np.bincount(idx, weights=phi.xi * np.exp(-(t[idx] - phi.tau) / lam), minlength=t.size)
    if grid.uniform and grid.n > 0:
        d = math.exp(-grid.dt[0] / lam)
        return lfilter([1.0], [1.0, -d], b)
    y = np.empty_like(t)
    y[0] = b[0]
    for j in range(1, t.size):
        y[j] = y[j - 1] * math.exp(-grid.dt[j - 1] / lam) + b[j]
    return y


def superpose(components, signs) -> np.ndarray:
    """Pointwise signed sum X = sum_i w_i Y_i."""
    components = [np.asarray(c, dtype=float) for c in components]
    if len(components) != len(signs):
        raise ValueError("one sign per component required")
    n = {c.shape for c in components}
    if len(n) > 1:
        raise ValueError("component series must have equal lengths")
    out = np.zeros_like(components[0])
    for c, w in zip(components, signs):
        out += w * c
    return out


def gaussian_transition_loglik(
    z: np.ndarray, mu: float, rho0: float, sigma2: float, grid: TimeGrid
) -> float:
    """Log-density of the z series under the exact Gaussian OU transitions."""
    lam0 = -1.0 / math.log(rho0)
    # extreme proposals can overflow the quadratic form; inf maps to -inf
    # log-likelihood, which is the right rejection behaviour
    with np.errstate(over="ignore"):
        if grid.uniform:
            e = rho0 ** grid.dt[0]
            var = lam0 * sigma2 * (1.0 - e * e) / 2.0
            r = z[1:] - mu - (z[:-1] - mu) * e
            n = r.size
            return -0.5 * n * math.log(2.0 * math.pi * var) - float(r @ r) / (2.0 * var)
        e = rho0 ** grid.dt
        var = lam0 * sigma2 * (1.0 - e * e) / 2.0
        r = z[1:] - mu - (z[:-1] - mu) * e
        return float(np.sum(-0.5 * np.log(2.0 * math.pi * var) - r * r / (2.0 * var)))


def log_likelihood_obs(x: PricePath, params: Params, jump_paths, signs=None) -> float:
    """Augmented observation likelihood: Gaussian transitions of z = x - sum w_i y_i."""
    if signs is None:
        signs = [1] * len(jump_paths)
    z = np.asarray(x.values, dtype=float).copy()
    for y, w in zip(jump_paths, signs):
        y = np.asarray(y, dtype=float)
        if y.shape != z.shape:
            raise ValueError("jump paths must match the grid")
        z -= w * y
    return gaussian_transition_loglik(z, params.mu, params.rho0, params.sigma2, x.grid)
