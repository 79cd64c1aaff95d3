"""Seeded generation of forecast streams with known regime structure.

Streams are pieced together from regimes: contiguous runs of forecasts
whose bin memberships are drawn i.i.d. from a per-regime bin distribution.
The boundaries between regimes are the true change points, which makes
generated corpora usable as recovery oracles for the change-point
posterior and as benchmark inputs for backtests and sweeps.

All randomness comes from one numpy PCG64 generator seeded with the spec's
64-bit seed.  Draws happen in a fixed, documented order so outputs are
byte-identical for identical specs:

1. per regime, in order: the bin distribution, if it is specified as a
   Dirichlet concentration (one ``dirichlet`` draw);
2. per regime, in order: the bin memberships (one ``choice`` draw), then
   the within-bin values (one ``uniform`` draw; midpoint mode draws
   nothing);
3. the calendar gaps (one ``exponential`` draw for Poisson spacing;
   uniform spacing draws nothing);
4. the resolution (one ``random`` draw unless fixed).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Sequence

import numpy as np

from .changepoint import changepoint_posterior
from .errors import InvalidSpec
from .params import KairosisParams
from .streams import Forecast, ForecastStream, Question, as_utc

__all__ = [
    "DEFAULT_EPOCH",
    "WithinBin",
    "RegimeSpec",
    "UniformGaps",
    "PoissonGaps",
    "FromLastRegimeMean",
    "FixedResolution",
    "SyntheticSpec",
    "RecoveryReport",
    "single_bin",
    "generate_stream",
    "recovery_report",
    "benchmark_suite",
    "flat_suite",
    "spec_to_json",
    "spec_from_json",
    "load_spec_file",
]

DEFAULT_EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


class WithinBin(Enum):
    """Where a forecast lands inside its assigned bin."""

    BIN_MIDPOINT = "midpoint"
    UNIFORM_IN_BIN = "uniform"


def single_bin(bin_index: int, bins: int) -> tuple[float, ...]:
    """One-hot bin distribution: every forecast of the regime falls in
    ``bin_index`` (0-based)."""
    if not 0 <= bin_index < bins:
        raise InvalidSpec(f"bin {bin_index} outside 0..{bins - 1}")
    probs = [0.0] * bins
    probs[bin_index] = 1.0
    return tuple(probs)


@dataclass(frozen=True)
class RegimeSpec:
    """A run of forecasts sharing one bin distribution.

    Exactly one of ``bin_probs`` (an explicit distribution over the K
    bins) or ``dirichlet_alpha`` (a concentration vector to draw the
    distribution from) must be given.
    """

    length: int
    bin_probs: tuple[float, ...] | None = None
    dirichlet_alpha: tuple[float, ...] | None = None
    within_bin: WithinBin = WithinBin.BIN_MIDPOINT

    def __post_init__(self):
        if self.length < 1:
            raise InvalidSpec(f"regime length must be >= 1, got {self.length}")
        if (self.bin_probs is None) == (self.dirichlet_alpha is None):
            raise InvalidSpec("give exactly one of bin_probs or dirichlet_alpha")
        if self.bin_probs is not None:
            probs = tuple(float(q) for q in self.bin_probs)
            if not probs or any(q < 0 for q in probs):
                raise InvalidSpec(f"bin_probs must be non-negative, got {probs!r}")
            if abs(sum(probs) - 1.0) > 1e-9:
                raise InvalidSpec(f"bin_probs sum to {sum(probs)!r}, not 1")
            object.__setattr__(self, "bin_probs", probs)
        else:
            alpha = tuple(float(a) for a in self.dirichlet_alpha)
            if not alpha or any(a <= 0 for a in alpha):
                raise InvalidSpec(f"dirichlet_alpha must be positive, got {alpha!r}")
            object.__setattr__(self, "dirichlet_alpha", alpha)

    @property
    def bins(self) -> int:
        return len(self.bin_probs if self.bin_probs is not None else self.dirichlet_alpha)


@dataclass(frozen=True)
class UniformGaps:
    """Forecasts spaced exactly ``gap_days`` apart."""

    gap_days: float = 1.0

    def __post_init__(self):
        if self.gap_days <= 0:
            raise InvalidSpec(f"gap_days must be positive, got {self.gap_days}")


@dataclass(frozen=True)
class PoissonGaps:
    """Forecast arrivals follow a Poisson process: exponential gaps with
    mean 1/rate_per_day days."""

    rate_per_day: float = 1.0

    def __post_init__(self):
        if self.rate_per_day <= 0:
            raise InvalidSpec(f"rate_per_day must be positive, got {self.rate_per_day}")


@dataclass(frozen=True)
class FromLastRegimeMean:
    """Resolve 1 with probability equal to the mean generated forecast of
    the final regime (one Bernoulli draw)."""


@dataclass(frozen=True)
class FixedResolution:
    outcome: int

    def __post_init__(self):
        if self.outcome not in (0, 1):
            raise InvalidSpec(f"fixed outcome must be 0 or 1, got {self.outcome!r}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Full recipe for one synthetic question."""

    regimes: tuple[RegimeSpec, ...]
    seed: int
    question_id: str = "synthetic"
    resolution_rule: FromLastRegimeMean | FixedResolution = FromLastRegimeMean()
    spacing: UniformGaps | PoissonGaps = UniformGaps()
    open_time: datetime = DEFAULT_EPOCH

    def __post_init__(self):
        object.__setattr__(self, "regimes", tuple(self.regimes))
        object.__setattr__(self, "open_time", as_utc(self.open_time))
        if not self.regimes:
            raise InvalidSpec("spec needs at least one regime")
        bins = {r.bins for r in self.regimes}
        if len(bins) != 1:
            raise InvalidSpec(f"regimes disagree on bin count: {sorted(bins)}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def bins(self) -> int:
        return self.regimes[0].bins

    @property
    def length(self) -> int:
        return sum(r.length for r in self.regimes)


@dataclass(frozen=True)
class RecoveryReport:
    """How well the posterior mode recovers the last true change point
    over seeded replications of a spec."""

    replications: int
    tolerance: int
    hit_rate: float
    error_quantiles: tuple[float, float, float, float, float]


def _mean_gap_days(spacing: UniformGaps | PoissonGaps) -> float:
    if isinstance(spacing, UniformGaps):
        return spacing.gap_days
    return 1.0 / spacing.rate_per_day


def generate_stream(spec: SyntheticSpec) -> tuple[ForecastStream, Question, tuple[int, ...]]:
    """Realize a spec into a stream, its question, and the true change
    points (1-based indices of the first forecast of each regime after
    the first).

    The question opens at ``spec.open_time``; the first forecast arrives
    one gap later and the question closes one mean gap after the last
    forecast, so every forecast is strictly inside the window.
    """
    rng = np.random.default_rng(int(spec.seed))
    k = spec.bins

    distributions = []
    for regime in spec.regimes:
        if regime.bin_probs is not None:
            distributions.append(np.asarray(regime.bin_probs))
        else:
            distributions.append(rng.dirichlet(regime.dirichlet_alpha))

    values = []
    for regime, probs in zip(spec.regimes, distributions):
        assigned = rng.choice(k, size=regime.length, p=probs)
        low = assigned / k
        high = (assigned + 1) / k
        if regime.within_bin is WithinBin.BIN_MIDPOINT:
            values.append((assigned + 0.5) / k)
        else:
            drawn = rng.uniform(low, high)
            values.append(np.minimum(drawn, np.nextafter(high, low)))
    probabilities = np.concatenate(values)
    n = probabilities.size

    if isinstance(spec.spacing, UniformGaps):
        gaps = np.full(n, spec.spacing.gap_days)
    else:
        gaps = rng.exponential(1.0 / spec.spacing.rate_per_day, size=n)
    offsets = np.cumsum(gaps)
    timestamps = [spec.open_time + timedelta(days=float(d)) for d in offsets]
    close_time = timestamps[-1] + timedelta(days=_mean_gap_days(spec.spacing))

    if isinstance(spec.resolution_rule, FixedResolution):
        resolution = spec.resolution_rule.outcome
    else:
        last_mean = float(values[-1].mean())
        resolution = int(rng.random() < last_mean)

    forecasts = tuple(
        Forecast(ts, float(p)) for ts, p in zip(timestamps, probabilities)
    )
    stream = ForecastStream(
        question_id=spec.question_id,
        forecasts=forecasts,
        open_time=spec.open_time,
        close_time=close_time,
    )
    question = Question(
        question_id=spec.question_id,
        open_time=spec.open_time,
        close_time=close_time,
        resolution=resolution,
    )
    boundaries = np.cumsum([r.length for r in spec.regimes[:-1]])
    return stream, question, tuple(int(b) + 1 for b in boundaries)


def recovery_report(
    spec: SyntheticSpec,
    params: KairosisParams,
    replications: int,
    tolerance: int = 10,
) -> RecoveryReport:
    """Replicate a multi-regime spec with seeds seed+0..seed+R-1 and
    measure how far the posterior mode lands from the last true change
    point."""
    if len(spec.regimes) < 2:
        raise InvalidSpec("recovery needs at least two regimes")
    if replications < 1:
        raise InvalidSpec(f"replications must be >= 1, got {replications}")
    errors = np.empty(replications)
    for r in range(replications):
        replica = dataclasses.replace(spec, seed=(int(spec.seed) + r) % 2**64)
        stream, _, changepoints = generate_stream(replica)
        posterior = changepoint_posterior(stream, params)
        errors[r] = posterior.argmax_t - changepoints[-1]
    hits = np.abs(errors) <= tolerance
    quantiles = np.quantile(errors, (0.0, 0.25, 0.5, 0.75, 1.0))
    return RecoveryReport(
        replications=replications,
        tolerance=tolerance,
        hit_rate=float(hits.mean()),
        error_quantiles=tuple(float(q) for q in quantiles),
    )


def benchmark_suite(
    master_seed: int,
    two_regime: int = 12,
    one_regime: int = 8,
    bins: int = 5,
) -> list[SyntheticSpec]:
    """A deterministic corpus of specs for backtests and sweeps.

    Two-regime questions move between a low bin (0 or 1) and a high bin
    (K-2 or K-1), in a random direction, with the change in the middle
    part of the stream; their resolution is fixed to the side of the
    final regime, modelling forecasters who end up tracking the truth.
    One-regime questions draw a single bin distribution from a flat
    Dirichlet and resolve by a Bernoulli draw of their mean forecast.
    Question ids are q000, q001, ... with the two-regime questions
    first; per-question seeds derive from ``master_seed``.
    """
    rng = np.random.default_rng(int(master_seed))
    specs: list[SyntheticSpec] = []
    for i in range(two_regime + one_regime):
        qid = f"q{i:03d}"
        seed = int(rng.integers(0, 2**63))
        if i < two_regime:
            first = int(rng.integers(80, 141))
            second = int(rng.integers(40, 101))
            low = int(rng.integers(0, 2))
            high = int(rng.integers(bins - 2, bins))
            if rng.random() < 0.5:
                low, high = high, low
            regimes = (
                RegimeSpec(first, single_bin(low, bins), within_bin=WithinBin.UNIFORM_IN_BIN),
                RegimeSpec(second, single_bin(high, bins), within_bin=WithinBin.UNIFORM_IN_BIN),
            )
            resolution: FromLastRegimeMean | FixedResolution = FixedResolution(
                int(high > low)
            )
        else:
            length = int(rng.integers(60, 201))
            regimes = (
                RegimeSpec(
                    length,
                    dirichlet_alpha=(1.0,) * bins,
                    within_bin=WithinBin.UNIFORM_IN_BIN,
                ),
            )
            resolution = FromLastRegimeMean()
        specs.append(
            SyntheticSpec(
                regimes=regimes, seed=seed, question_id=qid, resolution_rule=resolution
            )
        )
    return specs


def flat_suite(
    master_seed: int,
    questions: int = 20,
    bins: int = 5,
    within_bin: WithinBin = WithinBin.BIN_MIDPOINT,
) -> list[SyntheticSpec]:
    """A deterministic corpus with no change points: each question is a
    single regime concentrated on one bin, the flat-signal baseline for
    sweep insensitivity checks.

    With midpoint placement every stream is constant, so any weighting
    yields the same aggregate and sweep results are exactly independent
    of the prior rate; uniform placement adds within-bin jitter.
    """
    rng = np.random.default_rng(int(master_seed))
    specs = []
    for i in range(questions):
        seed = int(rng.integers(0, 2**63))
        length = int(rng.integers(60, 201))
        bin_index = int(rng.integers(0, bins))
        specs.append(
            SyntheticSpec(
                regimes=(
                    RegimeSpec(length, single_bin(bin_index, bins), within_bin=within_bin),
                ),
                seed=seed,
                question_id=f"q{i:03d}",
            )
        )
    return specs


def spec_to_json(spec: SyntheticSpec) -> dict:
    """JSON-serializable form of a spec; inverse of spec_from_json."""
    regimes = []
    for regime in spec.regimes:
        entry: dict = {"length": regime.length, "within_bin": regime.within_bin.value}
        if regime.bin_probs is not None:
            entry["bin_probs"] = list(regime.bin_probs)
        else:
            entry["dirichlet_alpha"] = list(regime.dirichlet_alpha)
        regimes.append(entry)
    if isinstance(spec.resolution_rule, FixedResolution):
        resolution = {"kind": "fixed", "outcome": spec.resolution_rule.outcome}
    else:
        resolution = {"kind": "from_last_regime_mean"}
    if isinstance(spec.spacing, UniformGaps):
        spacing = {"kind": "uniform", "gap_days": spec.spacing.gap_days}
    else:
        spacing = {"kind": "poisson", "rate_per_day": spec.spacing.rate_per_day}
    return {
        "question_id": spec.question_id,
        "seed": int(spec.seed),
        "open_time": spec.open_time.isoformat(),
        "regimes": regimes,
        "resolution": resolution,
        "spacing": spacing,
    }


def _parse_regime(data: dict, where: str) -> RegimeSpec:
    if not isinstance(data, dict):
        raise InvalidSpec(f"{where}: expected an object, got {type(data).__name__}")
    known = {"length", "bin_probs", "dirichlet_alpha", "within_bin"}
    unknown = set(data) - known
    if unknown:
        raise InvalidSpec(f"{where}: unknown fields {sorted(unknown)}")
    if "length" not in data:
        raise InvalidSpec(f"{where}: missing 'length'")
    try:
        within = WithinBin(data.get("within_bin", "midpoint"))
    except ValueError:
        raise InvalidSpec(
            f"{where}: within_bin must be 'midpoint' or 'uniform', "
            f"got {data['within_bin']!r}"
        ) from None
    return RegimeSpec(
        length=int(data["length"]),
        bin_probs=tuple(data["bin_probs"]) if "bin_probs" in data else None,
        dirichlet_alpha=tuple(data["dirichlet_alpha"]) if "dirichlet_alpha" in data else None,
        within_bin=within,
    )


def spec_from_json(data: dict, default_question_id: str = "synthetic") -> SyntheticSpec:
    """Parse one spec object, raising InvalidSpec with the offending
    field on malformed input."""
    if not isinstance(data, dict):
        raise InvalidSpec(f"spec must be an object, got {type(data).__name__}")
    known = {"question_id", "seed", "open_time", "regimes", "resolution", "spacing"}
    unknown = set(data) - known
    if unknown:
        raise InvalidSpec(f"unknown spec fields {sorted(unknown)}")
    if "seed" not in data:
        raise InvalidSpec("missing 'seed'")
    if "regimes" not in data or not isinstance(data["regimes"], list):
        raise InvalidSpec("'regimes' must be a list of regime objects")
    regimes = tuple(
        _parse_regime(r, f"regimes[{i}]") for i, r in enumerate(data["regimes"])
    )

    resolution_data = data.get("resolution", {"kind": "from_last_regime_mean"})
    kind = resolution_data.get("kind") if isinstance(resolution_data, dict) else None
    if kind == "from_last_regime_mean":
        resolution_rule: FromLastRegimeMean | FixedResolution = FromLastRegimeMean()
    elif kind == "fixed":
        if "outcome" not in resolution_data:
            raise InvalidSpec("resolution kind 'fixed' needs an 'outcome'")
        resolution_rule = FixedResolution(int(resolution_data["outcome"]))
    else:
        raise InvalidSpec(
            f"resolution kind must be 'from_last_regime_mean' or 'fixed', got {kind!r}"
        )

    spacing_data = data.get("spacing", {"kind": "uniform"})
    kind = spacing_data.get("kind") if isinstance(spacing_data, dict) else None
    if kind == "uniform":
        spacing: UniformGaps | PoissonGaps = UniformGaps(
            float(spacing_data.get("gap_days", 1.0))
        )
    elif kind == "poisson":
        if "rate_per_day" not in spacing_data:
            raise InvalidSpec("spacing kind 'poisson' needs a 'rate_per_day'")
        spacing = PoissonGaps(float(spacing_data["rate_per_day"]))
    else:
        raise InvalidSpec(f"spacing kind must be 'uniform' or 'poisson', got {kind!r}")

    open_time = DEFAULT_EPOCH
    if "open_time" in data:
        from .io import parse_instant

        try:
            open_time = parse_instant(str(data["open_time"]))
        except ValueError as exc:
            raise InvalidSpec(f"open_time: {exc}") from None

    return SyntheticSpec(
        regimes=regimes,
        seed=int(data["seed"]),
        question_id=str(data.get("question_id", default_question_id)),
        resolution_rule=resolution_rule,
        spacing=spacing,
        open_time=open_time,
    )


def load_spec_file(path) -> list[SyntheticSpec]:
    """Load one spec or a list of specs from a JSON file.

    A top-level object is a single question; a top-level array is a
    corpus, with question ids defaulting to q001, q002, ...
    """
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(data, list):
        specs = [
            spec_from_json(entry, default_question_id=f"q{i + 1:03d}")
            for i, entry in enumerate(data)
        ]
    else:
        specs = [spec_from_json(data)]
    ids = [s.question_id for s in specs]
    if len(set(ids)) != len(ids):
        raise InvalidSpec(f"duplicate question ids in {path}")
    return specs
