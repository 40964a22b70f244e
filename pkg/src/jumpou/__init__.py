"""Bayesian calibration of multi-factor OU jump models for energy spot prices."""

from .diagnostics import PpcReport, acf, jump_day_map, ks_one_sample, ks_two_sample, ppc, residuals
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
    gaussian_ou_moments,
    intensity_eval,
    intensity_integral,
    jump_ou_path,
    log_likelihood_obs,
    superpose,
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
    log_prior,
    sample_prior,
)
from .seasonal import (
    CalendarSeries,
    SeasonalCoefficients,
    deseasonalize,
    fit_seasonal,
    reseasonalize,
    seasonal_trend,
)
from .selection import (
    SelectionEntry,
    SelectionPlan,
    SelectionResult,
    enumerate_specs,
    escalate_intensity,
    select,
)
from .simulate import SimulationTruth, sample_gaussian_ou, sample_marked_poisson, sample_model

__version__ = "0.1.0"

__all__ = [
    "CalendarSeries",
    "ChainOutput",
    "ComponentPriors",
    "ComponentSpec",
    "ConstantIntensity",
    "FlatPositivePrior",
    "GammaPrior",
    "InverseGammaPrior",
    "JumpParams",
    "MarkedPointProcess",
    "ModelSpec",
    "NormalPrior",
    "Params",
    "PeriodicIntensity",
    "PosteriorSample",
    "PpcReport",
    "PricePath",
    "PriorSpec",
    "SamplerConfig",
    "SeasonalCoefficients",
    "SelectionEntry",
    "SelectionPlan",
    "SelectionResult",
    "SimulationTruth",
    "TimeGrid",
    "UniformPrior",
    "acf",
    "default_priors",
    "deseasonalize",
    "enumerate_specs",
    "escalate_intensity",
    "fit_seasonal",
    "gaussian_ou_moments",
    "intensity_eval",
    "intensity_integral",
    "jump_day_map",
    "jump_ou_path",
    "ks_one_sample",
    "ks_two_sample",
    "log_likelihood_obs",
    "log_prior",
    "ppc",
    "reseasonalize",
    "residuals",
    "run",
    "sample_gaussian_ou",
    "sample_marked_poisson",
    "sample_model",
    "sample_prior",
    "seasonal_trend",
    "select",
    "superpose",
]
