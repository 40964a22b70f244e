#!/usr/bin/env python3
"""Parameter-recovery study on simulated 2-OU data.

Simulates daily observations from the one-jump-component model
(mu=1, sigma2=0.01, lam0=8, lam1=2, beta=0.7, configurable jump rate),
fits it with wide priors centred as in the study design, and prints the
posterior means per seed alongside the true values.

Example:
    python3 scripts/simulation_study.py --eta 0.1 --seeds 1 2 3 --profile quick
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from jumpou.mcmc import SamplerConfig, run
from jumpou.model import (
    ComponentSpec,
    ConstantIntensity,
    JumpParams,
    ModelSpec,
    Params,
    PricePath,
    TimeGrid,
)
from jumpou.priors import ComponentPriors, GammaPrior, PriorSpec, default_priors
from jumpou.simulate import sample_model

PROFILES = {
    "quick": (50_000, 150_000, 10),
    "full": (500_000, 1_500_000, 100),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=0.1, help="true jump rate")
    ap.add_argument("--n-obs", type=int, default=1000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1])
    ap.add_argument("--profile", choices=PROFILES, default="quick")
    ap.add_argument("--phi-updates", type=int, default=5)
    args = ap.parse_args()

    spec = ModelSpec((ComponentSpec(1),))
    truth_params = Params(
        mu=1.0,
        sigma2=0.01,
        rho0=math.exp(-1.0 / 8.0),
        jumps=(
            JumpParams(
                rho=math.exp(-1.0 / 2.0),
                beta=0.7,
                intensity=ConstantIntensity(args.eta),
            ),
        ),
    )
    base = default_priors(spec)
    priors = PriorSpec(
        mu=base.mu,
        sigma2=base.sigma2,
        rho0=base.rho0,
        components=(
            ComponentPriors(
                rho=base.components[0].rho,
                beta=base.components[0].beta,
                eta=GammaPrior(1.0, 1.0 / args.eta),
            ),
        ),
    )
    burn, iters, thin = PROFILES[args.profile]
    grid = TimeGrid.daily(args.n_obs)

    true_row = {
        "mu": 1.0,
        "sigma2": 0.01,
        "rho0": math.exp(-1 / 8),
        "rho1": math.exp(-1 / 2),
        "eta": args.eta,
        "beta": 0.7,
    }
    print("true:", "  ".join(f"{k}={v:.4f}" for k, v in true_row.items()))
    for seed in args.seeds:
        truth = sample_model(spec, truth_params, grid, seed=seed)
        config = SamplerConfig(
            burn_in=burn,
            n_iters=iters,
            thin=thin,
            phi_updates=args.phi_updates,
            seed=seed + 1,
        )
        start = time.perf_counter()
        out = run(PricePath(grid, truth.observed), spec, priors, config)
        elapsed = time.perf_counter() - start
        means = {
            "mu": np.mean(out.param_series(lambda p: p.mu)),
            "sigma2": np.mean(out.param_series(lambda p: p.sigma2)),
            "rho0": np.mean(out.param_series(lambda p: p.rho0)),
            "rho1": np.mean(out.param_series(lambda p: p.jumps[0].rho)),
            "eta": np.mean(out.param_series(lambda p: p.jumps[0].intensity.eta)),
            "beta": np.mean(out.param_series(lambda p: p.jumps[0].beta)),
        }
        n_t = np.mean([s.phis[0].tau.size for s in out.samples])
        print(
            f"seed {seed} ({elapsed:.0f}s): "
            + "  ".join(f"{k}={v:.4f}" for k, v in means.items())
            + f"  mean N_T={n_t:.1f} (true {truth.phis[0].tau.size})"
        )


if __name__ == "__main__":
    main()
