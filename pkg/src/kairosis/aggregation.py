"""Weighting schemes and central-tendency aggregates for forecast streams.

Four weighting schemes are provided: uniform, change-point (kairosis),
keep-the-recent-fraction, and exponential decay.  Each maps a stream of N
forecasts to N non-negative weights summing to one; the weighted median or
weighted mean of the forecasts under those weights is the aggregate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

import numpy as np

from .changepoint import changepoint_posterior, kairos_weights, log_geometric_prior
from .errors import LengthMismatch, NoForecastsYet, UnnormalizedWeights
from .params import KairosisParams
from .streams import ForecastStream

__all__ = [
    "Uniform",
    "Kairosis",
    "RecentFraction",
    "ExponentialDecay",
    "WeightingScheme",
    "AggregateKind",
    "compute_weights",
    "weighted_median",
    "weighted_mean",
    "aggregate_at_time",
]


@dataclass(frozen=True)
class Uniform:
    """Every forecast weighted equally."""

    label = "uniform"


@dataclass(frozen=True)
class Kairosis:
    """Weights from the CMF of the change-point posterior."""

    params: KairosisParams = field(default_factory=KairosisParams)

    label = "kairosis"


@dataclass(frozen=True)
class RecentFraction:
    """Equal weight on the most recent ceil(fraction * N) forecasts, zero
    on the rest.  The default keeps the newest 20%."""

    fraction: float = 0.2

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must lie in (0, 1], got {self.fraction}")

    label = "recent"


@dataclass(frozen=True)
class ExponentialDecay:
    """Weights proportional to the CMF of a geometric distribution over
    positions, so weight decays by a factor (1 - p) per step into the
    past.  This is the change-point weighting with the data term removed:
    with a single bin the two coincide exactly."""

    p: float = 1.0 / 20.0

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"decay p must lie in (0, 1), got {self.p}")

    label = "expdecay"


WeightingScheme = Uniform | Kairosis | RecentFraction | ExponentialDecay


class AggregateKind(Enum):
    WEIGHTED_MEDIAN = "median"
    WEIGHTED_MEAN = "mean"

    @property
    def label(self) -> str:
        return self.value


def compute_weights(stream: ForecastStream, scheme: WeightingScheme) -> np.ndarray:
    """Per-forecast aggregation weights under ``scheme``.

    Returns a vector of len(stream) non-negative reals summing to 1,
    indexed in forecaster time.
    """
    n = len(stream)
    if isinstance(scheme, Uniform):
        return np.full(n, 1.0 / n)
    if isinstance(scheme, Kairosis):
        posterior = changepoint_posterior(stream, scheme.params)
        return kairos_weights(posterior).normalized()
    if isinstance(scheme, RecentFraction):
        keep = math.ceil(scheme.fraction * n)
        w = np.zeros(n)
        w[n - keep:] = 1.0 / keep
        return w
    if isinstance(scheme, ExponentialDecay):
        t = np.arange(1, n + 1, dtype=float)
        cmf = np.cumsum(np.exp(log_geometric_prior(t, n, scheme.p)))
        return cmf / cmf.sum()
    raise TypeError(f"unknown weighting scheme {scheme!r}")


def _check_pair(values: np.ndarray, weights: np.ndarray):
    if values.shape != weights.shape or values.ndim != 1:
        raise LengthMismatch(
            f"{values.shape} forecasts paired with {weights.shape} weights"
        )
    total = weights.sum()
    if abs(total - 1.0) > 1e-9:
        raise UnnormalizedWeights(f"weights sum to {total!r}, not 1")


def weighted_median(forecasts, weights) -> float:
    """Smallest forecast, in ascending order, whose cumulative weight
    strictly exceeds one half.

    Sorting is stable, so equal forecast values keep their input order;
    the returned value is unaffected by tie order.  Weights must sum to 1
    within 1e-9.
    """
    values = np.asarray(forecasts, dtype=float)
    w = np.asarray(weights, dtype=float)
    _check_pair(values, w)
    order = np.argsort(values, kind="stable")
    cumulative = np.cumsum(w[order])
    k = int(np.searchsorted(cumulative, 0.5, side="right"))
    k = min(k, values.size - 1)
    return float(values[order[k]])


def weighted_mean(forecasts, weights) -> float:
    """Weighted arithmetic mean under the same validation as
    weighted_median."""
    values = np.asarray(forecasts, dtype=float)
    w = np.asarray(weights, dtype=float)
    _check_pair(values, w)
    return float(values @ w)


def aggregate_at_time(
    stream: ForecastStream,
    cutoff: datetime,
    scheme: WeightingScheme,
    kind: AggregateKind,
) -> float:
    """Aggregate of all forecasts submitted at or before ``cutoff``.

    The stream is restricted to the cutoff, forecaster time is re-indexed
    1..N' on the restriction, and weights are recomputed there; raises
    NoForecastsYet when nothing precedes the cutoff.  Callers are
    expected to keep the cutoff inside the question window; a later
    cutoff simply keeps the whole stream.
    """
    kept = stream.until(cutoff)
    if not kept:
        raise NoForecastsYet(
            f"question {stream.question_id!r} has no forecasts at or before {cutoff}"
        )
    restricted = ForecastStream(
        question_id=stream.question_id,
        forecasts=kept,
        open_time=stream.open_time,
        close_time=stream.close_time,
    )
    weights = compute_weights(restricted, scheme)
    values = restricted.probabilities
    if kind is AggregateKind.WEIGHTED_MEDIAN:
        return weighted_median(values, weights)
    return weighted_mean(values, weights)
