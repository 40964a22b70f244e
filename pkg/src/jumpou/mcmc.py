"""Data-augmented Gibbs sampler for the (n+1)-OU model.

One sweep cycles through the conjugate updates of mu and sigma^2,
random-walk Metropolis-Hastings updates of the mean-reversion parameters
rho (and of the periodic intensity parameters), the conjugate updates of
eta and beta, and m rounds of marked-point-process moves (birth-death,
local displacement, multiplicative resize) per jump component.

Passing ``data=None`` switches the observation likelihood off, so the
chain targets the prior jointly with the point-process law; this is the
operative correctness check for the Phi moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import (
    ConstantIntensity,
    JumpParams,
    MarkedPointProcess,
    ModelSpec,
    Params,
    PeriodicIntensity,
    PricePath,
    TimeGrid,
    gaussian_transition_loglik,
    intensity_eval,
    intensity_integral,
    jump_ou_path,
)
from .priors import FlatPositivePrior, PriorSpec, log_prior

__all__ = [
    "SamplerConfig",
    "ChainState",
    "PosteriorSample",
    "ChainOutput",
    "default_initial_params",
    "initial_state",
    "update_mu",
    "update_sigma2",
    "update_rhos",
    "update_intensity",
    "update_beta",
    "phi_birth_death",
    "phi_displacement",
    "phi_resize",
    "sweep",
    "run",
]

NEG_INF = float("-inf")


@dataclass
class SamplerConfig:
    """Chain length, move tuning and reproducibility knobs."""

    burn_in: int = 50_000
    n_iters: int = 150_000
    thin: int = 10
    phi_updates: int = 1  # m rounds of Phi moves per sweep
    birth_prob: float = 0.5
    resize_c2: float = 0.1  # c^2 = resize_c2 / N_T
    accept_band: tuple[float, float] = (0.2, 0.5)
    adapt_interval: int = 250
    cache_refresh: int = 10_000
    seed: int = 0
    # initial random-walk proposal scales (adapted during burn-in)
    rho0_scale: float = 0.01
    rho_scale: float = 0.02
    eta_scale: float = 0.02
    theta_scale: float = 5.0
    delta_scale: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.birth_prob < 1.0:
            raise ValueError("birth_prob must lie in (0, 1)")
        if self.phi_updates < 1 or self.thin < 1:
            raise ValueError("phi_updates and thin must be >= 1")
        lo, hi = self.accept_band
        if not 0.0 < lo < hi < 1.0:
            raise ValueError("invalid acceptance band")


class _MoveStats:
    """Acceptance counters, total and windowed (for burn-in adaptation)."""

    def __init__(self):
        self.accepted = 0
        self.total = 0
        self._w_acc = 0
        self._w_tot = 0

    def record(self, accepted: bool):
        self.total += 1
        self._w_acc += accepted
        self._w_tot += 1
        self.accepted += accepted

    def window_rate(self):
        return self._w_acc / self._w_tot if self._w_tot else None

    def reset_window(self):
        self._w_acc = self._w_tot = 0

    @property
    def rate(self):
        return self.accepted / self.total if self.total else math.nan


@dataclass
class ChainState:
    """Mutable sampler state with caches kept consistent with Params and Phi."""

    spec: ModelSpec
    params: Params
    phis: list[MarkedPointProcess]
    jump_paths: list[np.ndarray]
    z: np.ndarray
    loglik: float
    iteration: int = 0

    def refresh_caches(self, data: PricePath | None, grid: TimeGrid):
        self.jump_paths = [
            jump_ou_path(phi, jp.lam, grid)
            for phi, jp in zip(self.phis, self.params.jumps)
        ]
        if data is None:
            self.z = np.zeros(grid.t.size)
            self.loglik = 0.0
        else:
            z = data.values.copy()
            for y, w in zip(self.jump_paths, self.spec.signs):
                z -= w * y
            self.z = z
            self.loglik = gaussian_transition_loglik(
                z, self.params.mu, self.params.rho0, self.params.sigma2, grid
            )


@dataclass(frozen=True)
class PosteriorSample:
    params: Params
    phis: tuple[MarkedPointProcess, ...]


@dataclass
class ChainOutput:
    spec: ModelSpec
    samples: list[PosteriorSample]
    acceptance: dict[str, tuple[int, int]]
    scales: dict[str, float]
    config: SamplerConfig

    def param_series(self, getter) -> np.ndarray:
        return np.asarray([getter(s.params) for s in self.samples])


def default_initial_params(spec: ModelSpec) -> Params:
    """Chain initialisation: mu=1, lam0=5 and component values matching the
    published case-study start points (sigma=0.1, lam1=2, eta=0.1, beta=0.5
    for one component; sigma=0.2, lam in {5,1}, eta=0.001 for two)."""
    n = spec.n
    sigma2 = 0.01 if n <= 1 else 0.04
    jumps = []
    for i, c in enumerate(spec.components):
        lam = 2.0 if n <= 1 else 5.0 * 0.2**i
        eta = 0.1 if n <= 1 else 0.001
        if c.periodic:
            intensity = PeriodicIntensity(eta=eta, theta=130.0, delta=0.1, period=c.period)
        else:
            intensity = ConstantIntensity(eta)
        jumps.append(
            JumpParams(rho=math.exp(-1.0 / lam), beta=0.5, intensity=intensity)
        )
    return Params(mu=1.0, sigma2=sigma2, rho0=math.exp(-1.0 / 5.0), jumps=tuple(jumps))


def initial_state(
    spec: ModelSpec,
    data: PricePath | None,
    grid: TimeGrid,
    params: Params | None = None,
) -> ChainState:
    """Fresh state with empty point processes and coherent caches."""
    params = default_initial_params(spec) if params is None else params
    state = ChainState(
        spec=spec,
        params=params,
        phis=[MarkedPointProcess.empty(grid.horizon) for _ in range(spec.n)],
        jump_paths=[],
        z=np.empty(0),
        loglik=0.0,
    )
    state.refresh_caches(data, grid)
    return state


def _transition_terms(rho0: float, sigma2: float, grid: TimeGrid):
    """Per-increment decay e_i and variance Sigma_i^2 (scalars on uniform grids)."""
    lam0 = -1.0 / math.log(rho0)
    if grid.uniform:
        e = rho0 ** grid.dt[0]
        return e, lam0 * sigma2 * (1.0 - e * e) / 2.0
    e = rho0**grid.dt
    return e, lam0 * sigma2 * (1.0 - e * e) / 2.0


def update_mu(state: ChainState, data, priors: PriorSpec, grid: TimeGrid, rng) -> ChainState:
    """Step 1: exact draw from the Normal full conditional."""
    prior = priors.mu
    if data is None:
        mu = prior.sample(rng)
        state.params = state.params.replace(mu=mu)
        return state
    z = state.z
    e, var = _transition_terms(state.params.rho0, state.params.sigma2, grid)
    resp = z[1:] - z[:-1] * e
    # e and var are scalars on uniform grids; broadcast to one term per increment
    coef = np.broadcast_to(np.asarray(1.0 - e, dtype=float), resp.shape)
    var = np.broadcast_to(np.asarray(var, dtype=float), resp.shape)
    prec = float(np.sum(coef * coef / var)) + 1.0 / prior.sd**2
    num = float(np.sum(coef * resp / var)) + prior.mean / prior.sd**2
    mu = rng.normal(num / prec, math.sqrt(1.0 / prec))
    state.params = state.params.replace(mu=mu)
    state.loglik = gaussian_transition_loglik(
        z, mu, state.params.rho0, state.params.sigma2, grid
    )
    return state


def update_sigma2(state: ChainState, data, priors: PriorSpec, grid: TimeGrid, rng) -> ChainState:
    """Step 2: exact draw from the Inverse-Gamma full conditional."""
    prior = priors.sigma2
    if data is None:
        s2 = prior.sample(rng)
        state.params = state.params.replace(sigma2=s2)
        return state
    z = state.z
    p = state.params
    lam0 = p.lam0
    if grid.uniform:
        e = p.rho0 ** grid.dt[0]
        denom = 1.0 - e * e
        r = z[1:] - z[:-1] * e - p.mu * (1.0 - e)
        rate_lik = float(r @ r) / (lam0 * denom)
    else:
        e = p.rho0**grid.dt
        r = z[1:] - z[:-1] * e - p.mu * (1.0 - e)
        rate_lik = float(np.sum(r * r / (1.0 - e * e))) / lam0
    shape = grid.n / 2.0 + prior.a
    rate = rate_lik + prior.b
    s2 = rate / rng.gamma(shape)
    state.params = state.params.replace(sigma2=s2)
    state.loglik = gaussian_transition_loglik(z, p.mu, p.rho0, s2, grid)
    return state


def _propose_rho0(state, data, priors, spec, grid, rng, scale, stats):
    p = state.params
    prop = rng.normal(p.rho0, scale)
    if not 0.0 < prop < 1.0:
        stats.record(False)
        return
    try:
        new_params = p.replace(rho0=prop)
    except ValueError:
        stats.record(False)
        return
    dprior = log_prior(new_params, priors, spec) - log_prior(p, priors, spec)
    if dprior == NEG_INF:
        stats.record(False)
        return
    if data is None:
        new_lik = 0.0
    else:
        new_lik = gaussian_transition_loglik(state.z, p.mu, prop, p.sigma2, grid)
    logr = (new_lik - state.loglik) + dprior
    if math.log(rng.uniform()) < logr:
        state.params = new_params
        state.loglik = new_lik
        stats.record(True)
    else:
        stats.record(False)


def _propose_rho_i(state, i, data, priors, spec, grid, rng, scale, stats):
    p = state.params
    jp = p.jumps[i]
    prop = rng.normal(jp.rho, scale)
    if not 0.0 < prop < 1.0:
        stats.record(False)
        return
    jumps = list(p.jumps)
    jumps[i] = replace(jp, rho=prop)
    new_params = p.replace(jumps=tuple(jumps))
    dprior = log_prior(new_params, priors, spec) - log_prior(p, priors, spec)
    if dprior == NEG_INF:
        stats.record(False)
        return
    new_path = jump_ou_path(state.phis[i], jumps[i].lam, grid)
    if data is None:
        new_z = state.z
        new_lik = 0.0
    else:
        new_z = state.z + spec.signs[i] * (state.jump_paths[i] - new_path)
        new_lik = gaussian_transition_loglik(new_z, p.mu, p.rho0, p.sigma2, grid)
    logr = (new_lik - state.loglik) + dprior
    if math.log(rng.uniform()) < logr:
        state.params = new_params
        state.jump_paths[i] = new_path
        state.z = new_z
        state.loglik = new_lik
        stats.record(True)
    else:
        stats.record(False)


def update_rhos(state: ChainState, data, priors: PriorSpec, grid: TimeGrid, rng, scales, stats) -> ChainState:
    """Step 3: sequential single-coordinate RW-MH on rho0 and each rho_i."""
    spec = state.spec
    _propose_rho0(state, data, priors, spec, grid, rng, scales["rho0"], stats["rho0"])
    for i in range(spec.n):
        _propose_rho_i(
            state, i, data, priors, spec, grid, rng, scales[f"rho{i}"], stats[f"rho{i}"]
        )
    return state


def _log_phi_density_theta(theta, phi: MarkedPointProcess) -> float:
    """Terms of the point-process density that depend on the intensity."""
    total = -intensity_integral(theta, 0.0, phi.horizon)
    if phi.count:
        rates = intensity_eval(theta, phi.tau)
        if np.any(rates <= 0.0):
            return NEG_INF
        total += float(np.sum(np.log(rates)))
    return total


def update_intensity(state: ChainState, priors: PriorSpec, grid: TimeGrid, rng, scales, stats) -> ChainState:
    """Step 4: conjugate Gamma draw (constant kind) or RW-MH on (eta, theta, delta)."""
    p = state.params
    T = grid.horizon
    jumps = list(p.jumps)
    for i, jp in enumerate(jumps):
        cp = priors.components[i]
        phi = state.phis[i]
        if isinstance(jp.intensity, ConstantIntensity):
            if isinstance(cp.eta, FlatPositivePrior):
                shape, rate = phi.count + 1.0, T
            else:
                shape, rate = cp.eta.a + phi.count, T + cp.eta.b
            eta = rng.gamma(shape) / rate
            jumps[i] = replace(jp, intensity=ConstantIntensity(eta))
        else:
            cur = jp.intensity
            prop_eta = rng.normal(cur.eta, scales[f"eta{i}"])
            prop_theta = rng.normal(cur.theta, scales[f"theta{i}"])
            prop_delta = rng.normal(cur.delta, scales[f"delta{i}"])
            ok = (
                prop_eta > 0
                and prop_delta > 0
                and cp.theta.lo < prop_theta < cp.theta.hi
            )
            if not ok:
                stats[f"intensity{i}"].record(False)
                continue
            prop = PeriodicIntensity(prop_eta, prop_theta, prop_delta, cur.period)
            logr = (
                _log_phi_density_theta(prop, phi)
                - _log_phi_density_theta(cur, phi)
                + cp.eta.logpdf(prop_eta)
                - cp.eta.logpdf(cur.eta)
                + cp.delta.logpdf(prop_delta)
                - cp.delta.logpdf(cur.delta)
            )
            if math.log(rng.uniform()) < logr:
                jumps[i] = replace(jp, intensity=prop)
                stats[f"intensity{i}"].record(True)
            else:
                stats[f"intensity{i}"].record(False)
    state.params = p.replace(jumps=tuple(jumps))
    return state


def update_beta(state: ChainState, priors: PriorSpec, rng) -> ChainState:
    """Step 5: exact draw from the Inverse-Gamma full conditional."""
    p = state.params
    jumps = list(p.jumps)
    for i, jp in enumerate(jumps):
        cp = priors.components[i]
        shape = cp.beta.a + state.phis[i].count
        rate = cp.beta.b + float(np.sum(state.phis[i].xi))
        beta = rate / rng.gamma(shape)
        jumps[i] = replace(jp, beta=beta)
    state.params = p.replace(jumps=tuple(jumps))
    return state


def _path_delta(tau: float, xi: float, lam: float, grid: TimeGrid) -> np.ndarray:
    """Contribution of a single point to the component path at grid times."""
    t = grid.t
    delta = np.zeros_like(t)
    j0 = int(np.searchsorted(t, tau, side="left"))
    if j0 < t.size:
        delta[j0:] = xi * np.exp(-(t[j0:] - tau) / lam)
    return delta


def _try_phi_state(state, i, data, grid, new_phi, new_path, log_extra, rng, stats):
    """Shared accept/reject for Phi proposals given the proposed path."""
    p = state.params
    if data is None:
        new_z = state.z
        new_lik = 0.0
    else:
        new_z = state.z + state.spec.signs[i] * (state.jump_paths[i] - new_path)
        new_lik = gaussian_transition_loglik(new_z, p.mu, p.rho0, p.sigma2, grid)
    logr = (new_lik - state.loglik) + log_extra
    if logr > 0 or math.log(rng.uniform()) < logr:
        state.phis[i] = new_phi
        state.jump_paths[i] = new_path
        state.z = new_z
        state.loglik = new_lik
        stats.record(True)
    else:
        stats.record(False)


def phi_birth_death(state: ChainState, i: int, data, grid: TimeGrid, p_birth: float, rng, stats) -> ChainState:
    """Step 6a: add a uniformly placed Ex(beta) point or delete a uniform pick."""
    jp = state.params.jumps[i]
    phi = state.phis[i]
    T = grid.horizon
    if rng.uniform() < p_birth:
        tau = rng.uniform(0.0, T)
        xi = rng.exponential(jp.beta)
        rate = intensity_eval(jp.intensity, tau)
        if rate <= 0.0:
            stats["birth"].record(False)
            return state
        log_extra = (
            math.log1p(-p_birth)
            - math.log(p_birth)
            + math.log(T)
            - math.log(phi.count + 1)
            + math.log(rate)
        )
        new_phi = phi.with_point(tau, xi)
        new_path = state.jump_paths[i] + _path_delta(tau, xi, jp.lam, grid)
        _try_phi_state(state, i, data, grid, new_phi, new_path, log_extra, rng, stats["birth"])
    else:
        if phi.count == 0:
            stats["death"].record(False)
            return state
        j = int(rng.integers(phi.count))
        tau, xi = float(phi.tau[j]), float(phi.xi[j])
        rate = intensity_eval(jp.intensity, tau)
        # inverse of the birth ratio evaluated at the removed point; a point
        # sitting at zero rate has zero density and is always removable
        if rate <= 0.0:
            log_extra = math.inf
        else:
            log_extra = (
                math.log(p_birth)
                - math.log1p(-p_birth)
                - math.log(T)
                + math.log(phi.count)
                - math.log(rate)
            )
        new_phi = phi.without_point(j)
        new_path = state.jump_paths[i] - _path_delta(tau, xi, jp.lam, grid)
        _try_phi_state(state, i, data, grid, new_phi, new_path, log_extra, rng, stats["death"])
    return state


def phi_displacement(state: ChainState, i: int, data, grid: TimeGrid, rng, stats) -> ChainState:
    """Step 6b: move one point within its neighbour gap, re-sizing its mark
    deterministically along the decay curve."""
    jp = state.params.jumps[i]
    phi = state.phis[i]
    if phi.count == 0:
        stats.record(False)
        return state
    j = int(rng.integers(phi.count))
    lo = phi.tau[j - 1] if j > 0 else 0.0
    hi = phi.tau[j + 1] if j + 1 < phi.count else grid.horizon
    tau_old, xi_old = float(phi.tau[j]), float(phi.xi[j])
    tau_new = rng.uniform(lo, hi)
    growth = -(tau_new - tau_old) / jp.lam
    if abs(growth) > 500.0:
        # the mark would over- or underflow by a factor e^500; acceptance is
        # indistinguishable from zero there, so reject before the arithmetic
        # breaks down
        stats.record(False)
        return state
    xi_new = xi_old * math.exp(growth)
    rate_old = intensity_eval(jp.intensity, tau_old)
    rate_new = intensity_eval(jp.intensity, tau_new)
    if rate_new <= 0.0:
        stats.record(False)
        return state
    log_extra = (
        math.log(rate_new)
        - math.log(rate_old)
        - (xi_new - xi_old) / jp.beta
        - (tau_new - tau_old) / jp.lam
    )
    tau_arr = phi.tau.copy()
    xi_arr = phi.xi.copy()
    tau_arr[j], xi_arr[j] = tau_new, xi_new
    new_phi = MarkedPointProcess(tau_arr, xi_arr, phi.horizon)
    new_path = (
        state.jump_paths[i]
        - _path_delta(tau_old, xi_old, jp.lam, grid)
        + _path_delta(tau_new, xi_new, jp.lam, grid)
    )
    _try_phi_state(state, i, data, grid, new_phi, new_path, log_extra, rng, stats)
    return state


def phi_resize(state: ChainState, i: int, data, grid: TimeGrid, c2: float, rng, stats) -> ChainState:
    """Step 6c: jointly rescale all marks by i.i.d. log-normal factors.

    Acceptance uses the Ex(beta) mark-density ratio exp(-sum(dxi)/beta)
    times the log-normal proposal ratio prod(xi'/xi).
    """
    jp = state.params.jumps[i]
    phi = state.phis[i]
    if phi.count == 0:
        stats.record(False)
        return state
    c = math.sqrt(c2 / phi.count)
    log_factors = rng.normal(0.0, c, size=phi.count)
    xi_new = phi.xi * np.exp(log_factors)
    log_extra = -float(np.sum(xi_new - phi.xi)) / jp.beta + float(np.sum(log_factors))
    new_phi = phi.with_marks(xi_new)
    new_path = jump_ou_path(new_phi, jp.lam, grid)
    _try_phi_state(state, i, data, grid, new_phi, new_path, log_extra, rng, stats)
    return state


def _phi_round(state, data, grid, config, rng, stats):
    for i in range(state.spec.n):
        move = rng.integers(3)
        if move == 0:
            phi_birth_death(state, i, data, grid, config.birth_prob, rng, stats[f"phi{i}"])
        elif move == 1:
            phi_displacement(state, i, data, grid, rng, stats[f"phi{i}"]["disp"])
        else:
            phi_resize(state, i, data, grid, config.resize_c2, rng, stats[f"phi{i}"]["resize"])


def sweep(state: ChainState, config: SamplerConfig, data, priors: PriorSpec, grid: TimeGrid, rng, scales, stats) -> ChainState:
    """One full Gibbs cycle (Steps 1-6)."""
    update_mu(state, data, priors, grid, rng)
    update_sigma2(state, data, priors, grid, rng)
    update_rhos(state, data, priors, grid, rng, scales, stats)
    update_intensity(state, priors, grid, rng, scales, stats)
    update_beta(state, priors, rng)
    for _ in range(config.phi_updates):
        _phi_round(state, data, grid, config, rng, stats)
    state.iteration += 1
    return state


def _make_scales(spec: ModelSpec, config: SamplerConfig) -> dict[str, float]:
    scales = {"rho0": config.rho0_scale}
    for i, c in enumerate(spec.components):
        scales[f"rho{i}"] = config.rho_scale
        if c.periodic:
            scales[f"eta{i}"] = config.eta_scale
            scales[f"theta{i}"] = config.theta_scale
            scales[f"delta{i}"] = config.delta_scale
    return scales


def _make_stats(spec: ModelSpec) -> dict:
    stats = {"rho0": _MoveStats()}
    for i, c in enumerate(spec.components):
        stats[f"rho{i}"] = _MoveStats()
        if c.periodic:
            stats[f"intensity{i}"] = _MoveStats()
        stats[f"phi{i}"] = {
            "birth": _MoveStats(),
            "death": _MoveStats(),
            "disp": _MoveStats(),
            "resize": _MoveStats(),
        }
    return stats


def _adapt(scales, stats, spec, band):
    lo, hi = band
    targets = [("rho0", "rho0")]
    for i, c in enumerate(spec.components):
        targets.append((f"rho{i}", f"rho{i}"))
        if c.periodic:
            for name in (f"eta{i}", f"theta{i}", f"delta{i}"):
                targets.append((name, f"intensity{i}"))
    for scale_key, stat_key in targets:
        rate = stats[stat_key].window_rate()
        if rate is None:
            continue
        if rate < lo:
            scales[scale_key] *= 0.7
        elif rate > hi:
            scales[scale_key] *= 1.5
    for s in stats.values():
        if isinstance(s, _MoveStats):
            s.reset_window()
        else:
            for m in s.values():
                m.reset_window()


def _flatten_stats(stats) -> dict[str, tuple[int, int]]:
    out = {}
    for k, v in stats.items():
        if isinstance(v, _MoveStats):
            out[k] = (v.accepted, v.total)
        else:
            for mk, mv in v.items():
                out[f"{k}.{mk}"] = (mv.accepted, mv.total)
    return out


def run(
    data: PricePath | None,
    spec: ModelSpec,
    priors: PriorSpec,
    config: SamplerConfig,
    grid: TimeGrid | None = None,
    init: Params | None = None,
) -> ChainOutput:
    """Burn in with adaptation, then sample with frozen proposal scales.

    ``data=None`` runs the likelihood-off chain; ``grid`` is then required
    to fix the horizon of the point processes.
    """
    if data is not None:
        grid = data.grid
    elif grid is None:
        raise ValueError("grid required when data is None")
    if len(priors.components) != spec.n:
        raise ValueError("priors must cover every jump component")
    rng = np.random.default_rng(config.seed)
    scales = _make_scales(spec, config)
    stats = _make_stats(spec)
    state = initial_state(spec, data, grid, params=init)
    if not math.isfinite(state.loglik):
        raise ValueError("non-finite likelihood at the initial state")

    for it in range(config.burn_in):
        sweep(state, config, data, priors, grid, rng, scales, stats)
        if (it + 1) % config.adapt_interval == 0:
            _adapt(scales, stats, spec, config.accept_band)
        if (it + 1) % config.cache_refresh == 0:
            state.refresh_caches(data, grid)

    # freeze scales; restart counters so reported rates reflect sampling
    stats = _make_stats(spec)
    samples: list[PosteriorSample] = []
    for it in range(config.n_iters):
        sweep(state, config, data, priors, grid, rng, scales, stats)
        if (it + 1) % config.thin == 0:
            samples.append(PosteriorSample(state.params, tuple(state.phis)))
        if (it + 1) % config.cache_refresh == 0:
            state.refresh_caches(data, grid)
        if not math.isfinite(state.loglik):
            raise RuntimeError("non-finite likelihood during sampling")
    return ChainOutput(
        spec=spec,
        samples=samples,
        acceptance=_flatten_stats(stats),
        scales=dict(scales),
        config=config,
    )
