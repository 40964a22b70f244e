"""Command-line interface: data ingestion, configuration, persistence.

Subcommands ``deseasonalize``, ``simulate``, ``fit``, ``diagnose`` and
``select`` each take ``--config <path>``, ``--seed <u64>`` and
``--out <dir>``.  The seed may also be overridden through the
``JUMPOU_SEED`` environment variable.  Chain samples are persisted as
line-delimited JSON records behind an explicit schema header.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .diagnostics import ppc
from .mcmc import ChainOutput, PosteriorSample, SamplerConfig, run
from .model import (
    ComponentSpec,
    ConstantIntensity,
    JumpParams,
    MarkedPointProcess,
    ModelSpec,
    Params,
    PeriodicIntensity,
    PricePath,
    TimeGrid,
)
from .priors import (
    ComponentPriors,
    FlatPositivePrior,
    GammaPrior,
    InverseGammaPrior,
    NormalPrior,
    PriorSpec,
    UniformPrior,
    default_priors,
)
from .seasonal import CalendarSeries, deseasonalize, fit_seasonal
from .selection import SelectionPlan, select
from .simulate import SimulationTruth, sample_model

__all__ = ["main", "ingest_csv", "save_samples", "load_samples", "emit_plot_data"]

SAMPLE_SCHEMA = "jumpou.posterior-samples.v1"

QUICK_PROFILE = dict(burn_in=50_000, n_iters=150_000, thin=10)
FULL_PROFILE = dict(burn_in=500_000, n_iters=1_500_000, thin=100)


class CliError(Exception):
    pass


# ---------------------------------------------------------------- ingestion


def ingest_csv(path) -> CalendarSeries:
    """Parse a `date,price` CSV; ISO dates, weekends dropped, duplicates rejected."""
    path = Path(path)
    dates: list[np.datetime64] = []
    prices: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header[:2]] != ["date", "price"]:
            raise CliError(f"{path}: expected header 'date,price'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise CliError(f"{path}:{lineno}: malformed row")
            try:
                day = np.datetime64(row[0].strip(), "D")
                price = float(row[1])
            except Exception:
                raise CliError(f"{path}:{lineno}: malformed row") from None
            if math.isnan(price):
                raise CliError(f"{path}:{lineno}: malformed row")
            dates.append(day)
            prices.append(price)
    if not dates:
        raise CliError(f"{path}: no data rows")
    d = np.asarray(dates)
    order = np.argsort(d)
    repeats = np.flatnonzero(np.diff(d[order].view("int64")) == 0)
    if repeats.size:
        raise CliError(f"{path}: duplicate date {d[order][repeats[0]]}")
    try:
        return CalendarSeries(d[order], np.asarray(prices)[order])
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


# ----------------------------------------------------- config (de)serialisation


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "components": [
            {"sign": c.sign, "period": c.period} for c in spec.components
        ]
    }


def spec_from_dict(d: dict) -> ModelSpec:
    return ModelSpec(
        tuple(
            ComponentSpec(sign=int(c["sign"]), period=c.get("period"))
            for c in d.get("components", [])
        )
    )


_PRIOR_KINDS = {
    "normal": (NormalPrior, ("mean", "sd")),
    "inverse_gamma": (InverseGammaPrior, ("a", "b")),
    "gamma": (GammaPrior, ("a", "b")),
    "uniform": (UniformPrior, ("lo", "hi")),
    "flat_positive": (FlatPositivePrior, ()),
}


def _prior_to_dict(p) -> dict | None:
    if p is None:
        return None
    for name, (cls, fields) in _PRIOR_KINDS.items():
        if type(p) is cls:
            return {"dist": name, **{f: getattr(p, f) for f in fields}}
    raise CliError(f"unknown prior family {type(p).__name__}")


def _prior_from_dict(d: dict | None):
    if d is None:
        return None
    cls, fields = _PRIOR_KINDS[d["dist"]]
    return cls(**{f: d[f] for f in fields})


def priors_to_dict(priors: PriorSpec) -> dict:
    return {
        "mu": _prior_to_dict(priors.mu),
        "sigma2": _prior_to_dict(priors.sigma2),
        "rho0": _prior_to_dict(priors.rho0),
        "components": [
            {
                "rho": _prior_to_dict(c.rho),
                "beta": _prior_to_dict(c.beta),
                "eta": _prior_to_dict(c.eta),
                "theta": _prior_to_dict(c.theta),
                "delta": _prior_to_dict(c.delta),
            }
            for c in priors.components
        ],
    }


def priors_from_dict(d: dict) -> PriorSpec:
    return PriorSpec(
        mu=_prior_from_dict(d["mu"]),
        sigma2=_prior_from_dict(d["sigma2"]),
        rho0=_prior_from_dict(d["rho0"]),
        components=tuple(
            ComponentPriors(
                rho=_prior_from_dict(c["rho"]),
                beta=_prior_from_dict(c["beta"]),
                eta=_prior_from_dict(c["eta"]),
                theta=_prior_from_dict(c.get("theta")),
                delta=_prior_from_dict(c.get("delta")),
            )
            for c in d.get("components", [])
        ),
    )


def params_to_dict(p: Params) -> dict:
    jumps = []
    for jp in p.jumps:
        item = {"rho": jp.rho, "beta": jp.beta, "eta": jp.intensity.eta}
        if isinstance(jp.intensity, PeriodicIntensity):
            item.update(
                theta=jp.intensity.theta,
                delta=jp.intensity.delta,
                period=jp.intensity.period,
            )
        jumps.append(item)
    return {"mu": p.mu, "sigma2": p.sigma2, "rho0": p.rho0, "jumps": jumps}


def params_from_dict(d: dict) -> Params:
    jumps = []
    for item in d.get("jumps", []):
        if "period" in item and item["period"] is not None:
            intensity = PeriodicIntensity(
                eta=item["eta"], theta=item["theta"], delta=item["delta"], period=item["period"]
            )
        else:
            intensity = ConstantIntensity(item["eta"])
        jumps.append(JumpParams(rho=item["rho"], beta=item["beta"], intensity=intensity))
    return Params(mu=d["mu"], sigma2=d["sigma2"], rho0=d["rho0"], jumps=tuple(jumps))


def sampler_config_from_dict(d: dict, seed: int) -> SamplerConfig:
    profile = d.get("profile", "quick")
    if profile not in ("quick", "full"):
        raise CliError(f"unknown profile {profile!r}")
    base = dict(QUICK_PROFILE if profile == "quick" else FULL_PROFILE)
    keys = (
        "burn_in",
        "n_iters",
        "thin",
        "phi_updates",
        "birth_prob",
        "resize_c2",
        "adapt_interval",
    )
    base.update({k: d[k] for k in keys if k in d})
    return SamplerConfig(seed=seed, **base)


# ----------------------------------------------------------------- persistence


def save_samples(path, chain: ChainOutput):
    """Line-delimited sample records behind a schema header; round-trips."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "schema": SAMPLE_SCHEMA,
            "spec": spec_to_dict(chain.spec),
            "n_samples": len(chain.samples),
            "acceptance": {k: list(v) for k, v in chain.acceptance.items()},
            "scales": chain.scales,
        }
        fh.write(json.dumps(header) + "\n")
        for s in chain.samples:
            rec = {
                "params": params_to_dict(s.params),
                "phis": [
                    {"tau": phi.tau.tolist(), "xi": phi.xi.tolist(), "horizon": phi.horizon}
                    for phi in s.phis
                ],
            }
            fh.write(json.dumps(rec) + "\n")


def load_samples(path) -> tuple[ModelSpec, list[PosteriorSample], dict]:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("schema") != SAMPLE_SCHEMA:
            raise CliError(f"{path}: unexpected schema {header.get('schema')!r}")
        spec = spec_from_dict(header["spec"])
        samples = []
        for line in fh:
            rec = json.loads(line)
            phis = tuple(
                MarkedPointProcess(
                    np.asarray(p["tau"]), np.asarray(p["xi"]), p["horizon"]
                )
                for p in rec["phis"]
            )
            samples.append(PosteriorSample(params_from_dict(rec["params"]), phis))
    return spec, samples, header


def posterior_summary(spec: ModelSpec, samples) -> list[dict]:
    """Mean/SD rows in the layout of the posterior-properties tables,
    including the derived lambda views."""
    rows = []

    def add(name, values):
        v = np.asarray(values, dtype=float)
        rows.append({"parameter": name, "mean": float(v.mean()), "sd": float(v.std(ddof=1))})

    params = [s.params for s in samples]
    add("mu", [p.mu for p in params])
    add("sigma2", [p.sigma2 for p in params])
    add("rho0", [p.rho0 for p in params])
    add("lambda0", [p.lam0 for p in params])
    for i, c in enumerate(spec.components):
        add(f"rho{i + 1}", [p.jumps[i].rho for p in params])
        add(f"lambda{i + 1}", [p.jumps[i].lam for p in params])
        add(f"eta{i + 1}", [p.jumps[i].intensity.eta for p in params])
        add(f"beta{i + 1}", [p.jumps[i].beta for p in params])
        if c.periodic:
            add(f"theta{i + 1}", [p.jumps[i].intensity.theta for p in params])
            add(f"delta{i + 1}", [p.jumps[i].intensity.delta for p in params])
    return rows


def _write_series_csv(path, columns: dict):
    keys = list(columns)
    rows = zip(*(columns[k] for k in keys))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(keys)
        for row in rows:
            writer.writerow(row)


def emit_plot_data(artifact, kind: str, path):
    """Long-format numeric tables for external plotting."""
    if kind == "series" and isinstance(artifact, PricePath):
        _write_series_csv(path, {"t": artifact.grid.t, "x": artifact.values})
    elif kind == "decomposition" and isinstance(artifact, (SimulationTruth, PricePath)):
        if isinstance(artifact, SimulationTruth):
            grid, x, comps = artifact.grid, artifact.observed, artifact.components
        else:
            if artifact.components is None:
                raise CliError("decomposition requires a path with components")
            grid, x, comps = artifact.grid, artifact.values, artifact.components
        cols = {"t": grid.t, "x": x}
        for i, c in enumerate(comps):
            cols[f"y{i}"] = c
        _write_series_csv(path, cols)
    elif kind == "acf" and isinstance(artifact, np.ndarray):
        _write_series_csv(path, {"lag": np.arange(artifact.size), "acf": artifact})
    elif kind == "jump_map" and isinstance(artifact, dict):
        _write_series_csv(
            path, {"day": list(artifact.keys()), "mean_size": list(artifact.values())}
        )
    elif kind == "monthly_jumps" and isinstance(artifact, list):
        # artifact: posterior samples; monthly (260/12-day) mean jump counts
        raise CliError("pass a precomputed table for monthly_jumps")
    else:
        raise CliError(f"cannot emit kind {kind!r} for {type(artifact).__name__}")


def monthly_jump_counts(samples, component: int, horizon: float) -> dict:
    """Mean (over samples) jump count per 260/12-day month bin."""
    month = 260.0 / 12.0
    n_bins = int(math.ceil(horizon / month))
    counts = np.zeros(n_bins)
    samples = list(samples)
    for s in samples:
        phi = s.phis[component]
        if phi.count:
            idx = np.minimum((phi.tau / month).astype(int), n_bins - 1)
            counts += np.bincount(idx, minlength=n_bins)
    counts /= max(len(samples), 1)
    return {"month": np.arange(n_bins), "mean_jumps": counts}


# ----------------------------------------------------------------- commands


def _apply_profile_flags(args, config: dict) -> dict:
    """Command-line profile flags win over the config file's choice."""
    if getattr(args, "full", False):
        profile = "full"
    elif getattr(args, "quick", False):
        profile = "quick"
    else:
        return config
    return {**config, "sampler": {**config.get("sampler", {}), "profile": profile}}


def _load_config(path) -> dict:
    if path is None:
        raise CliError("--config is required")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _prepare_out(args, config: dict, seed: int) -> Path:
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    record = {"command": args.command, "seed": seed, "config": config}
    with open(out / "run_config.json", "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2)
    return out


def _resolve_seed(args, config: dict) -> int:
    env = os.environ.get("JUMPOU_SEED")
    if env is not None:
        return int(env)
    if args.seed is not None:
        return int(args.seed)
    return int(config.get("seed", 0))


def _data_from_config(config: dict, out: Path | None = None) -> PricePath:
    if "input" not in config:
        raise CliError("config requires 'input' (CSV path)")
    series = ingest_csv(config["input"])
    coeffs = fit_seasonal(series)
    return deseasonalize(series, coeffs)


def cmd_deseasonalize(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(args, config)
    out = _prepare_out(args, config, seed)
    series = ingest_csv(config["input"])
    coeffs = fit_seasonal(series)
    path = deseasonalize(series, coeffs)
    with open(out / "seasonal_coefficients.json", "w", encoding="utf-8") as fh:
        json.dump({**coeffs.as_dict(), "residual_norm": coeffs.residual_norm}, fh, indent=2)
    _write_series_csv(
        out / "deseasonalised.csv",
        {"date": [str(d) for d in series.dates], "t": path.grid.t, "x": path.values},
    )
    return 0


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(args, config)
    out = _prepare_out(args, config, seed)
    sim = config.get("simulate", {})
    spec = spec_from_dict(config.get("model", {}))
    params = params_from_dict(sim["params"])
    grid = TimeGrid.daily(int(sim.get("n_obs", 1000)))
    truth = sample_model(spec, params, grid, seed)
    with open(out / "truth.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "spec": spec_to_dict(spec),
                "params": params_to_dict(params),
                "seed": seed,
                "phis": [
                    {"tau": p.tau.tolist(), "xi": p.xi.tolist(), "horizon": p.horizon}
                    for p in truth.phis
                ],
            },
            fh,
            indent=2,
        )
    emit_plot_data(truth, "decomposition", out / "series.csv")
    return 0


def cmd_fit(args) -> int:
    config = _apply_profile_flags(args, _load_config(args.config))
    seed = _resolve_seed(args, config)
    out = _prepare_out(args, config, seed)
    data = _data_from_config(config)
    spec = spec_from_dict(config.get("model", {}))
    priors = (
        priors_from_dict(config["priors"]) if "priors" in config else default_priors(spec)
    )
    sampler = sampler_config_from_dict(config.get("sampler", {}), seed)
    chain = run(data, spec, priors, sampler)
    save_samples(out / "samples.jsonl", chain)
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "posterior": posterior_summary(spec, chain.samples),
                "acceptance": {
                    k: {"accepted": a, "total": t, "rate": (a / t if t else None)}
                    for k, (a, t) in chain.acceptance.items()
                },
            },
            fh,
            indent=2,
        )
    return 0


def cmd_diagnose(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(args, config)
    out = _prepare_out(args, config, seed)
    data = _data_from_config(config)
    samples_path = config.get("samples", str(Path(args.out or "out") / "samples.jsonl"))
    spec, samples, _ = load_samples(samples_path)
    report = ppc(data, samples, spec, threshold=config.get("threshold", 0.1), seed=seed)
    with open(out / "ppc_report.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "p_values": report.p_values(),
                "adequate": report.adequate,
                "threshold": report.threshold,
                "residual_p": report.residual_p.tolist(),
                "jump_size_p": [p.tolist() for p in report.jump_size_p],
                "arrival_p": [p.tolist() for p in report.arrival_p],
            },
            fh,
            indent=2,
        )
    return 0


def cmd_select(args) -> int:
    config = _apply_profile_flags(args, _load_config(args.config))
    seed = _resolve_seed(args, config)
    out = _prepare_out(args, config, seed)
    data = _data_from_config(config)
    sel = config.get("selection", {})
    plan = SelectionPlan(
        threshold=sel.get("threshold", 0.1),
        max_n=sel.get("max_n", 2),
        chain_config=sampler_config_from_dict(config.get("sampler", {}), seed),
        period=sel.get("period", 130.0),
    )
    result = select(data, plan)
    log = []
    for e in result.entries:
        log.append(
            {
                "spec": spec_to_dict(e.spec),
                "description": e.spec.describe(),
                "accepted": e.accepted,
                "p_values": e.report.p_values() if e.report else None,
                "error": e.error,
            }
        )
    with open(out / "selection.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "accepted": spec_to_dict(result.accepted) if result.accepted else None,
                "log": log,
            },
            fh,
            indent=2,
        )
    if result.accepted_chain is not None:
        save_samples(out / "samples.jsonl", result.accepted_chain)
    return 0


COMMANDS = {
    "deseasonalize": cmd_deseasonalize,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "diagnose": cmd_diagnose,
    "select": cmd_select,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpou",
        description="Bayesian MCMC calibration of multi-factor OU jump models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        profile = p.add_mutually_exclusive_group()
        profile.add_argument(
            "--quick", action="store_true", help="desk-scale sampler profile (default)"
        )
        profile.add_argument(
            "--full", action="store_true", help="publication-scale sampler profile"
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CliError, FileNotFoundError, KeyError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        out = Path(args.out or "out")
        try:
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "error.json", "w", encoding="utf-8") as fh:
                json.dump(record, fh, indent=2)
        except OSError:
            pass
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
