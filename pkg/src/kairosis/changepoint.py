"""Posterior over most-recent-change-point locations and its CMF weights.

A candidate change point t in 1..N means the change occurs in the gap
between forecasts t-1 and t: forecasts 1..t-1 form the "before" segment
and forecasts t..N the "after" segment.  t = 1 means no change inside the
window.  Each candidate is scored by two independent compound
Dirichlet-categorical masses over bin counts plus a geometric prior on t,
all in log space; the normalized posterior's cumulative mass function
gives one weight per forecast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import EmptyCounts, NonPositiveAlpha
from .params import AlphaMode, KairosisParams
from .streams import ForecastStream

__all__ = [
    "PosteriorMass",
    "KairosWeights",
    "bin_index",
    "bin_counts",
    "log_dirichlet_categorical",
    "entropy_limit",
    "alpha_before",
    "log_geometric_prior",
    "changepoint_posterior",
    "kairos_weights",
]


def bin_index(probability: float, bins: int) -> int:
    """Map a probability to its bin in 0..bins-1.

    Bins are left-closed, right-open over [0, 1); the last bin is closed
    on the right so that probability 1.0 maps to bins - 1.
    """
    return min(int(probability * bins), bins - 1)


def bin_counts(probabilities, bins: int) -> np.ndarray:
    """Tally probabilities into ``bins`` equal-width bins.

    An empty input yields an all-zero count vector.
    """
    probs = np.asarray(probabilities, dtype=float)
    if probs.size == 0:
        return np.zeros(bins, dtype=np.int64)
    idx = np.minimum((probs * bins).astype(np.int64), bins - 1)
    return np.bincount(idx, minlength=bins).astype(np.int64)


def log_dirichlet_categorical(counts, alphas) -> float:
    """Log-mass that a compound Dirichlet-categorical model assigns to
    observing a particular sequence with the given bin counts.

    Parameters
    ----------
    counts : array_like of int
        Observed bin counts n_1..n_K.
    alphas : array_like of float
        Positive Dirichlet pseudo-counts, one per bin.

    Returns
    -------
    float
        log Gamma(sum a) - log Gamma(sum (n + a))
        + sum_k [log Gamma(n_k + a_k) - log Gamma(a_k)],
        evaluated entirely through log-gamma.
    """
    counts = np.asarray(counts, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0.0):
        raise NonPositiveAlpha(f"pseudo-counts must be positive, got {alphas}")
    return float(
        gammaln(alphas.sum())
        - gammaln((counts + alphas).sum())
        + (gammaln(counts + alphas) - gammaln(alphas)).sum()
    )


def entropy_limit(counts) -> float:
    """Large-count limit of the Dirichlet-categorical log-mass.

    Returns N * sum_k (n_k/N) log(n_k/N), with 0 log 0 taken as 0; this is
    the negative sample entropy scaled by the total count, the value the
    log-mass approaches as all counts grow.
    """
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise EmptyCounts("entropy limit of an empty tally is undefined")
    fractions = counts / total
    nonzero = counts > 0
    return float(total * np.sum(fractions[nonzero] * np.log(fractions[nonzero])))


def alpha_before(t: int, n: int, params: KairosisParams) -> np.ndarray:
    """Pre-change pseudo-counts for candidate t in a stream of length n.

    REMAINING_COUNT mode uses max(n - t, 1) in every bin; ELAPSED_COUNT
    uses alpha_scale * max(t - 1, 1).
    """
    if params.alpha_mode is AlphaMode.REMAINING_COUNT:
        value = float(max(n - t, 1))
    else:
        value = params.alpha_scale * float(max(t - 1, 1))
    return np.full(params.bins, value)


def log_geometric_prior(t, n: int, p: float):
    """Unnormalized log-prior log p + (n - t) log(1 - p) for candidate t.

    Truncated to t in 1..n the prior sums to 1 - (1 - p)^n; the missing
    normalization cancels when the posterior is normalized.  ``t`` may be
    a scalar or an array of candidates.
    """
    t_arr = np.asarray(t, dtype=float)
    out = np.log(p) + (n - t_arr) * np.log1p(-p)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PosteriorMass:
    """Normalized posterior over candidate change points t = 1..N."""

    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 1 or mass.size == 0:
            raise ValueError("posterior mass must be a non-empty vector")
        if np.any(mass < 0.0):
            raise ValueError("posterior mass entries must be non-negative")
        if abs(mass.sum() - 1.0) > 1e-10:
            raise ValueError(f"posterior mass sums to {mass.sum()!r}, not 1")
        mass = mass.copy()
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    def __len__(self) -> int:
        return self.mass.size

    @property
    def argmax_t(self) -> int:
        """Most probable candidate, as a 1-based forecaster-time index."""
        return int(np.argmax(self.mass)) + 1


@dataclass(frozen=True)
class KairosWeights:
    """CMF of the change-point posterior: one weight per forecast.

    weights[i-1] is the posterior probability that the most recent change
    happened at or before forecast i, so the vector is non-decreasing and
    ends at exactly 1.  ``normalized()`` rescales to sum to one for use as
    aggregation weights.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if np.any(np.diff(w) < -1e-12):
            raise ValueError("CMF weights must be non-decreasing")
        if abs(w[-1] - 1.0) > 1e-9:
            raise ValueError(f"last CMF weight is {w[-1]!r}, expected 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    def normalized(self) -> np.ndarray:
        w = self.weights / self.weights.sum()
        return w / w.sum()


def changepoint_posterior(stream: ForecastStream, params: KairosisParams) -> PosteriorMass:
    """Posterior mass over candidate change points of a stream.

    For each t in 1..N the log-score is the Dirichlet-categorical log-mass
    of the before-segment counts (pseudo-counts from ``alpha_before``)
    plus that of the after-segment counts (pseudo-counts all
    ``alpha_after``) plus the geometric log-prior; the scores are
    normalized by log-sum-exp.

    The sweep updates bin counts incrementally as t advances, so the whole
    posterior costs O(N K) log-gamma evaluations rather than O(N^2 K).
    """
    probs = stream.probabilities
    n = probs.size
    k = params.bins

    idx = np.minimum((probs * k).astype(np.int64), k - 1)
    total = np.bincount(idx, minlength=k).astype(float)

    # cum[j] = bin counts of forecasts 1..j; row t-1 is the before-segment of t
    cum = np.zeros((n + 1, k))
    cum[np.arange(1, n + 1), idx] = 1.0
    np.cumsum(cum, axis=0, out=cum)
    before = cum[:n]
    after = total[None, :] - before

    t = np.arange(1, n + 1, dtype=float)
    m_before = t - 1.0
    m_after = n - m_before

    if params.alpha_mode is AlphaMode.REMAINING_COUNT:
        a_before = np.maximum(n - t, 1.0)
    else:
        a_before = params.alpha_scale * np.maximum(t - 1.0, 1.0)
    a_after = float(params.alpha_after)

    log_before = (
        gammaln(k * a_before)
        - gammaln(m_before + k * a_before)
        + (gammaln(before + a_before[:, None]) - gammaln(a_before[:, None])).sum(axis=1)
    )
    log_after = (
        gammaln(k * a_after)
        - gammaln(m_after + k * a_after)
        + (gammaln(after + a_after) - gammaln(a_after)).sum(axis=1)
    )
    log_post = log_before + log_after + log_geometric_prior(t, n, params.p)

    mass = np.exp(log_post - logsumexp(log_post))
    mass /= mass.sum()
    return PosteriorMass(mass)


def kairos_weights(posterior: PosteriorMass) -> KairosWeights:
    """Cumulative mass of the posterior, one weight per forecast.

    The weight of forecast i is the posterior probability that the most
    recent change point lies at or before i; the last weight is pinned to
    exactly 1.
    """
    cmf = np.cumsum(posterior.mass)
    cmf /= cmf[-1]
    return KairosWeights(cmf)
