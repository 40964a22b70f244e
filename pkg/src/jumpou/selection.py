"""Stepwise model selection: sign combinations, intensity escalation, count growth.

For each component count n the driver fits every (positive, negative)
split with constant intensities, then every non-empty subset of periodic
intensities, accepting the first model whose posterior predictive
p-values all clear the threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .diagnostics import PpcReport, ppc
from .mcmc import ChainOutput, SamplerConfig, run
from .model import ComponentSpec, ModelSpec, PricePath
from .priors import PriorSpec, default_priors

__all__ = [
    "SelectionPlan",
    "SelectionEntry",
    "SelectionResult",
    "enumerate_specs",
    "escalate_intensity",
    "select",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionPlan:
    threshold: float = 0.1
    max_n: int = 3
    chain_config: SamplerConfig = field(default_factory=SamplerConfig)
    period: float = 130.0  # period used when escalating to periodic intensity
    holdout_fraction: float = 0.0  # optional re-check on a data suffix

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.max_n < 1:
            raise ValueError("max_n must be >= 1")


@dataclass(frozen=True)
class SelectionEntry:
    spec: ModelSpec
    report: PpcReport | None
    accepted: bool
    error: str | None = None


@dataclass(frozen=True)
class SelectionResult:
    entries: tuple[SelectionEntry, ...]
    accepted: ModelSpec | None
    accepted_chain: ChainOutput | None = None


def enumerate_specs(n: int) -> list[ModelSpec]:
    """All sign splits (pos, neg) with pos + neg = n, positives first."""
    if n < 1:
        raise ValueError("n must be >= 1")
    specs = []
    for pos in range(n, -1, -1):
        comps = [ComponentSpec(sign=1) for _ in range(pos)] + [
            ComponentSpec(sign=-1) for _ in range(n - pos)
        ]
        specs.append(ModelSpec(tuple(comps)))
    return specs


def escalate_intensity(spec: ModelSpec, period: float = 130.0) -> list[ModelSpec]:
    """Every non-empty subset of components switched to periodic intensity."""
    if any(c.periodic for c in spec.components):
        raise ValueError("spec must have all-constant intensities")
    n = spec.n
    variants = []
    for mask in range(1, 2**n):
        comps = [
            ComponentSpec(sign=c.sign, period=period if mask >> i & 1 else None)
            for i, c in enumerate(spec.components)
        ]
        variants.append(ModelSpec(tuple(comps)))
    return variants


def _fit_and_check(
    data: PricePath, spec: ModelSpec, plan: SelectionPlan, priors: PriorSpec | None
) -> tuple[ChainOutput, PpcReport]:
    pri = default_priors(spec) if priors is None else priors
    chain = run(data, spec, pri, plan.chain_config)
    report = ppc(data, chain.samples, spec, threshold=plan.threshold)
    return chain, report


def select(data: PricePath, plan: SelectionPlan, priors=None) -> SelectionResult:
    """Iterate n = 1, 2, ... through constant-then-periodic variants,
    accepting the first adequate model; fit failures are logged and skipped.

    ``priors`` may be a callable ModelSpec -> PriorSpec; defaults otherwise.
    """
    entries: list[SelectionEntry] = []
    make_priors = priors if callable(priors) else (lambda spec: priors)
    for n in range(1, plan.max_n + 1):
        base = enumerate_specs(n)
        candidates = list(base)
        for spec in base:
            candidates.extend(escalate_intensity(spec, plan.period))
        for spec in candidates:
            try:
                chain, report = _fit_and_check(data, spec, plan, make_priors(spec))
            except Exception as exc:  # keep sweeping the lattice
                log.warning("fit failed for %s: %s", spec.describe(), exc)
                entries.append(SelectionEntry(spec, None, False, error=str(exc)))
                continue
            accepted = report.adequate
            entries.append(SelectionEntry(spec, report, accepted))
            if accepted:
                return SelectionResult(tuple(entries), spec, chain)
    return SelectionResult(tuple(entries), None, None)
