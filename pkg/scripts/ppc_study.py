#!/usr/bin/env python3
"""Posterior predictive check calibration and misspecification power.

Part one fits the true one-jump-component model to its own simulated
data and reports how often all predictive p-values clear the adequacy
threshold. Part two fits the same one-component model to data simulated
from a two-component model (one positive, one negative) and reports how
often the residual check flags the misfit.

Example:
    python3 scripts/ppc_study.py --reps 5
"""

from __future__ import annotations

import argparse
import math
import time

from jumpou.diagnostics import ppc
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
from jumpou.priors import default_priors
from jumpou.simulate import sample_model

SPEC_1J = ModelSpec((ComponentSpec(1),))
SPEC_2J = ModelSpec((ComponentSpec(1), ComponentSpec(-1)))

PARAMS_1J = Params(
    mu=1.0,
    sigma2=0.01,
    rho0=math.exp(-1.0 / 8.0),
    jumps=(JumpParams(rho=math.exp(-1.0 / 2.0), beta=0.7, intensity=ConstantIntensity(0.1)),),
)
PARAMS_2J = Params(
    mu=1.0,
    sigma2=0.01,
    rho0=math.exp(-1.0 / 8.0),
    jumps=(
        JumpParams(rho=math.exp(-1.0 / 2.0), beta=0.7, intensity=ConstantIntensity(0.1)),
        JumpParams(rho=math.exp(-1.0 / 5.0), beta=2.5, intensity=ConstantIntensity(0.08)),
    ),
)


def fit_and_check(data: PricePath, seed: int):
    config = SamplerConfig(
        burn_in=30_000, n_iters=60_000, thin=60, phi_updates=5, seed=seed
    )
    out = run(data, SPEC_1J, default_priors(SPEC_1J), config)
    return ppc(data, out.samples, SPEC_1J, seed=seed + 1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--n-obs", type=int, default=1000)
    args = ap.parse_args()

    grid = TimeGrid.daily(args.n_obs)

    print("-- true model on its own data --")
    adequate = 0
    for seed in range(1, args.reps + 1):
        truth = sample_model(SPEC_1J, PARAMS_1J, grid, seed=600 + seed)
        start = time.perf_counter()
        report = fit_and_check(PricePath(grid, truth.observed), seed=600 + seed)
        ps = report.p_values()
        ok = all(p >= 0.1 for p in ps.values())
        adequate += ok
        print(f"seed {seed} ({time.perf_counter() - start:.0f}s): {ps} adequate={ok}")
    print(f"fully adequate: {adequate}/{args.reps}")

    print("-- one-component fit on two-component data --")
    flagged = 0
    for seed in range(1, args.reps + 1):
        truth = sample_model(SPEC_2J, PARAMS_2J, grid, seed=700 + seed)
        start = time.perf_counter()
        report = fit_and_check(PricePath(grid, truth.observed), seed=700 + seed)
        ps = report.p_values()
        hit = ps["residual"] < 0.1
        flagged += hit
        print(f"seed {seed} ({time.perf_counter() - start:.0f}s): {ps} flagged={hit}")
    print(f"residual misfit flagged: {flagged}/{args.reps}")


if __name__ == "__main__":
    main()
