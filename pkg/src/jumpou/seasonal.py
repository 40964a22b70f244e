"""Deterministic seasonal trend on log prices and its removal.

The trend is a_1 + a_2*tau + a_3 sin(2 pi tau) + a_4 cos(2 pi tau)
+ a_5 sin(4 pi tau) + a_6 cos(4 pi tau) with tau in 260-day years of
weekday observations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import PricePath, TimeGrid

__all__ = [
    "DAYS_PER_YEAR",
    "SeasonalCoefficients",
    "CalendarSeries",
    "seasonal_trend",
    "fit_seasonal",
    "deseasonalize",
    "reseasonalize",
]

log = logging.getLogger(__name__)

DAYS_PER_YEAR = 260.0


@dataclass(frozen=True)
class SeasonalCoefficients:
    a: tuple[float, float, float, float, float, float]
    residual_norm: float = 0.0

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) != 6 or not all(map(math.isfinite, a)):
            raise ValueError("six finite coefficients required")
        object.__setattr__(self, "a", a)

    def as_dict(self) -> dict:
        return {f"a{i + 1}": v for i, v in enumerate(self.a)}


def _design(tau: np.ndarray) -> np.ndarray:
    return np.column_stack(
        [
            np.ones_like(tau),
            tau,
            np.sin(2 * np.pi * tau),
            np.cos(2 * np.pi * tau),
            np.sin(4 * np.pi * tau),
            np.cos(4 * np.pi * tau),
        ]
    )


def seasonal_trend(coeffs: SeasonalCoefficients, tau) -> np.ndarray:
    """Evaluate f(tau) for tau in 260-day years."""
    tau = np.asarray(tau, dtype=float)
    return _design(np.atleast_1d(tau)) @ np.asarray(coeffs.a)


@dataclass(frozen=True)
class CalendarSeries:
    """Dated weekday price observations.

    Weekend rows are dropped on construction; the weekday day index
    (0, 1, 2, ...) from the first retained observation defines tau via
    the 260-day year.
    """

    dates: np.ndarray  # datetime64[D], weekdays only, strictly increasing
    prices: np.ndarray
    currency: str = ""

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        prices = np.asarray(self.prices, dtype=float)
        if dates.shape != prices.shape or dates.ndim != 1:
            raise ValueError("dates and prices must be 1-d arrays of equal length")
        if dates.size == 0:
            raise ValueError("empty series")
        # epoch day 0 (1970-01-01) was a Thursday; Monday = 0
        weekday = (dates.astype("datetime64[D]").view("int64") + 3) % 7
        keep = weekday < 5
        dates, prices = dates[keep], prices[keep]
        if dates.size == 0:
            raise ValueError("no weekday observations")
        if np.any(np.diff(dates.view("int64")) <= 0):
            raise ValueError("dates must be strictly increasing")
        dates.setflags(write=False)
        prices.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "prices", prices)

    def __len__(self) -> int:
        return self.dates.size

    @property
    def day_index(self) -> np.ndarray:
        """Count of retained (weekday) observations before each row."""
        return np.arange(self.dates.size, dtype=float)

    @property
    def tau(self) -> np.ndarray:
        return self.day_index / DAYS_PER_YEAR

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.day_index)


def _fill_nonpositive(prices: np.ndarray) -> np.ndarray:
    """Replace non-positive prices by the average of the nearest valid neighbours."""
    prices = prices.astype(float).copy()
    bad = np.flatnonzero(prices <= 0)
    if bad.size == 0:
        return prices
    good = np.flatnonzero(prices > 0)
    if good.size == 0:
        raise ValueError("no positive prices in series")
    for i in bad:
        left = good[good < i]
        right = good[good > i]
        neighbours = []
        if left.size:
            neighbours.append(prices[left[-1]])
        if right.size:
            neighbours.append(prices[right[0]])
        prices[i] = float(np.mean(neighbours))
    log.info("replaced %d non-positive prices by neighbour averages", bad.size)
    return prices


def fit_seasonal(series: CalendarSeries) -> SeasonalCoefficients:
    """Ordinary least squares of log price on the trend basis."""
    if len(series) < 7:
        raise ValueError("at least 7 observations required")
    prices = _fill_nonpositive(np.asarray(series.prices))
    y = np.log(prices)
    X = _design(series.tau)
    a, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < 6:
        raise ValueError("singular seasonal design matrix")
    resid = y - X @ a
    return SeasonalCoefficients(tuple(a), residual_norm=float(np.linalg.norm(resid)))


def deseasonalize(series: CalendarSeries, coeffs: SeasonalCoefficients) -> PricePath:
    """X(t) = S(t) exp(-f(t/260)) on the weekday-day grid."""
    prices = _fill_nonpositive(np.asarray(series.prices))
    x = prices * np.exp(-seasonal_trend(coeffs, series.tau))
    return PricePath(series.grid, x)


def reseasonalize(path: PricePath, coeffs: SeasonalCoefficients) -> np.ndarray:
    """Inverse of deseasonalize: S(t) = exp(f(t/260)) X(t)."""
    tau = path.grid.t / DAYS_PER_YEAR
    return path.values * np.exp(seasonal_trend(coeffs, tau))
