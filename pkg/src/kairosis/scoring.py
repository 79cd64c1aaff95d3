"""Proper scores, skill scores, and the backtest score table.

Aggregates are scored at three evaluation instants per question (25%, 50%
and 75% of the calendar window) with the positively oriented Brier and Log
rules, converted to skill relative to the uniform-weighted median, and
averaged across questions; the three per-time averages are then combined
either evenly or with weights (3, 2, 1)/6 favouring early skill.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .aggregation import (
    AggregateKind,
    Uniform,
    WeightingScheme,
    aggregate_at_time,
)
from .errors import DegenerateBenchmark, EmptyWindow, NoForecastsYet, UnresolvedQuestion
from .streams import ForecastStream, Question

__all__ = [
    "LOG_CLAMP_EPS",
    "ScoreKind",
    "TimeWeighting",
    "ScoreReport",
    "MethodScores",
    "ScoreTable",
    "raw_score",
    "skill_score",
    "eval_times",
    "time_aggregated_skill",
    "method_label",
    "standard_methods",
    "score_report",
    "score_table",
    "mean_brier_loss",
]

logger = logging.getLogger(__name__)

# Forecasts of exactly 0 or 1 are legal; the Log rule clamps them to keep
# scores finite.  The Brier rule needs no clamping.
LOG_CLAMP_EPS = 1e-6

BENCHMARK = (Uniform(), AggregateKind.WEIGHTED_MEDIAN)

_TIME_WEIGHTS = (3.0, 2.0, 1.0)
_TIME_LABELS = ("early", "middle", "late")


class ScoreKind(Enum):
    BRIER = "brier"
    LOG = "log"


class TimeWeighting(Enum):
    UNWEIGHTED_OVER_TIME = "unweighted"
    WEIGHTED_OVER_TIME = "weighted"


def raw_score(kind: ScoreKind, outcome: int, probability: float) -> float:
    """Positively oriented proper score of a forecast against an outcome.

    Brier: -(p - X)^2.  Log: X log p + (1 - X) log(1 - p), with p clamped
    to [1e-6, 1 - 1e-6] first.  Both are <= 0, with 0 attained only by the
    oracle forecast (up to clamping for Log).
    """
    if outcome not in (0, 1):
        raise UnresolvedQuestion(f"outcome must be 0 or 1, got {outcome!r}")
    x = float(outcome)
    p = float(probability)
    if kind is ScoreKind.BRIER:
        return -((p - x) ** 2)
    p = min(max(p, LOG_CLAMP_EPS), 1.0 - LOG_CLAMP_EPS)
    return x * math.log(p) + (1.0 - x) * math.log1p(-p)


def skill_score(kind: ScoreKind, outcome: int, probability: float, benchmark: float) -> float:
    """Score relative to a benchmark forecast: 0 matches the benchmark,
    1 matches the oracle.

    Computed as (S(X, p) - S(X, p0)) / (S(X, X) - S(X, p0)); the oracle
    score S(X, X) is 0 for both kinds, so this is 1 - S(X, p)/S(X, p0).
    Raises DegenerateBenchmark when the benchmark already scores 0.
    """
    s0 = raw_score(kind, outcome, benchmark)
    if s0 == 0.0:
        raise DegenerateBenchmark(
            f"benchmark forecast {benchmark!r} already attains the optimal {kind.value} score"
        )
    return (raw_score(kind, outcome, probability) - s0) / (0.0 - s0)


def eval_times(question: Question) -> tuple[datetime, datetime, datetime]:
    """The three evaluation instants of a question: 25%, 50% and 75% of
    the way from open to close."""
    if question.close_time <= question.open_time:
        raise EmptyWindow(f"question {question.question_id!r} has an empty window")
    quarter = (question.close_time - question.open_time) / 4
    return tuple(question.open_time + j * quarter for j in (1, 2, 3))


def time_aggregated_skill(skills: Sequence[float], weighting: TimeWeighting) -> float:
    """Combine (early, middle, late) skills into one number: the plain
    mean, or the (3, 2, 1)/6 weighted mean that rewards early skill."""
    if len(skills) != 3 or not all(math.isfinite(s) for s in skills):
        raise ValueError(f"expected three finite skill values, got {skills!r}")
    if weighting is TimeWeighting.UNWEIGHTED_OVER_TIME:
        return sum(skills) / 3.0
    return sum(w * s for w, s in zip(_TIME_WEIGHTS, skills)) / sum(_TIME_WEIGHTS)


def method_label(scheme: WeightingScheme, kind: AggregateKind) -> str:
    return f"{scheme.label}+{kind.label}"


def standard_methods(
    params=None, fraction: float = 0.2, decay_p: float = 1.0 / 20.0
) -> tuple[tuple[WeightingScheme, AggregateKind], ...]:
    """The eight method combinations of the standard backtest: four
    weighting schemes crossed with median and mean aggregation."""
    from .aggregation import ExponentialDecay, Kairosis, RecentFraction
    from .params import KairosisParams

    schemes = (
        Uniform(),
        Kairosis(params if params is not None else KairosisParams()),
        RecentFraction(fraction),
        ExponentialDecay(decay_p),
    )
    return tuple(
        (scheme, kind)
        for scheme in schemes
        for kind in (AggregateKind.WEIGHTED_MEDIAN, AggregateKind.WEIGHTED_MEAN)
    )


@dataclass(frozen=True)
class ScoreReport:
    """Skill of one method on one question, per evaluation time.

    Entries are None at evaluation times the question had no forecasts
    yet (or the benchmark was already perfect); the two means average the
    remaining times, renormalizing the time weights.
    """

    question_id: str
    method: str
    score_kind: ScoreKind
    early: float | None
    middle: float | None
    late: float | None
    unweighted: float | None
    weighted: float | None


@dataclass(frozen=True)
class MethodScores:
    """One row of the score table: a method's four aggregate skills."""

    method: str
    brier_unweighted: float
    brier_weighted: float
    log_unweighted: float
    log_weighted: float

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "brier_unweighted": self.brier_unweighted,
            "brier_weighted": self.brier_weighted,
            "log_unweighted": self.log_unweighted,
            "log_weighted": self.log_weighted,
        }


@dataclass(frozen=True)
class ScoreTable:
    """Rows of method skills, benchmarked against the uniform median."""

    rows: tuple[MethodScores, ...]
    n_questions: int
    benchmark: str = method_label(*BENCHMARK)

    def row(self, method: str) -> MethodScores:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)


def _question_skills(
    stream: ForecastStream,
    question: Question,
    methods: Sequence[tuple[WeightingScheme, AggregateKind]],
):
    """Per-method skills of one question at its three evaluation times.

    Yields (time_index, skills) where skills maps method index ->
    {ScoreKind: skill or None}; yields (time_index, None) for times the
    question has no forecasts yet.
    """
    if not question.is_resolved:
        raise UnresolvedQuestion(f"question {question.question_id!r} is unresolved")
    outcome = question.resolution
    for j, cutoff in enumerate(eval_times(question)):
        try:
            benchmark_value = aggregate_at_time(stream, cutoff, *BENCHMARK)
        except NoForecastsYet:
            logger.warning(
                "question %s: no forecasts before %s evaluation time; skipped",
                question.question_id,
                _TIME_LABELS[j],
            )
            yield j, None
            continue
        per_method = {}
        for m, (scheme, kind) in enumerate(methods):
            value = aggregate_at_time(stream, cutoff, scheme, kind)
            skills = {}
            for score_kind in ScoreKind:
                try:
                    skills[score_kind] = skill_score(
                        score_kind, outcome, value, benchmark_value
                    )
                except DegenerateBenchmark:
                    logger.warning(
                        "question %s: benchmark is perfect under the %s rule "
                        "at the %s evaluation time; cell skipped",
                        question.question_id,
                        score_kind.value,
                        _TIME_LABELS[j],
                    )
                    skills[score_kind] = None
            per_method[m] = skills
        yield j, per_method


def _combine_slots(slot_values: Sequence[float | None]) -> tuple[float | None, float | None]:
    """Unweighted and (3,2,1)/6-weighted means over the available
    evaluation-time slots, renormalizing over slots that have data."""
    present = [(w, v) for w, v in zip(_TIME_WEIGHTS, slot_values) if v is not None]
    if not present:
        return None, None
    unweighted = sum(v for _, v in present) / len(present)
    weighted = sum(w * v for w, v in present) / sum(w for w, _ in present)
    return unweighted, weighted


def score_report(
    stream: ForecastStream,
    question: Question,
    scheme: WeightingScheme,
    kind: AggregateKind,
    score_kind: ScoreKind,
) -> ScoreReport:
    """Skill of a single method on a single resolved question."""
    slots: list[float | None] = [None, None, None]
    for j, per_method in _question_skills(stream, question, [(scheme, kind)]):
        if per_method is not None:
            slots[j] = per_method[0][score_kind]
    unweighted, weighted = _combine_slots(slots)
    return ScoreReport(
        question_id=question.question_id,
        method=method_label(scheme, kind),
        score_kind=score_kind,
        early=slots[0],
        middle=slots[1],
        late=slots[2],
        unweighted=unweighted,
        weighted=weighted,
    )


def score_table(
    corpus: Iterable[tuple[ForecastStream, Question]],
    methods: Sequence[tuple[WeightingScheme, AggregateKind]] | None = None,
) -> ScoreTable:
    """Mean skill of each method across a corpus of resolved questions.

    For every question and evaluation time, each method's aggregate is
    scored against the uniform-weighted median computed at the same time;
    cell averages run over the questions that have forecasts by that time
    (questions are processed in question-id order so sums are
    reproducible).  The benchmark method's own row is identically zero.
    """
    if methods is None:
        methods = standard_methods()
    pairs = sorted(corpus, key=lambda pair: pair[1].question_id)
    if not pairs:
        raise ValueError("score_table needs at least one question")
    for _, question in pairs:
        if not question.is_resolved:
            raise UnresolvedQuestion(f"question {question.question_id!r} is unresolved")

    sums = np.zeros((len(methods), len(ScoreKind), 3))
    counts = np.zeros_like(sums, dtype=int)
    for stream, question in pairs:
        for j, per_method in _question_skills(stream, question, methods):
            if per_method is None:
                continue
            for m, skills in per_method.items():
                for k, score_kind in enumerate(ScoreKind):
                    if skills[score_kind] is not None:
                        sums[m, k, j] += skills[score_kind]
                        counts[m, k, j] += 1

    rows = []
    for m, (scheme, kind) in enumerate(methods):
        columns = {}
        for k, score_kind in enumerate(ScoreKind):
            slot_means = [
                sums[m, k, j] / counts[m, k, j] if counts[m, k, j] else None
                for j in range(3)
            ]
            unweighted, weighted = _combine_slots(slot_means)
            if unweighted is None:
                logger.warning(
                    "method %s has no scoreable cells under the %s rule",
                    method_label(scheme, kind),
                    score_kind.value,
                )
                unweighted = weighted = float("nan")
            columns[score_kind] = (unweighted, weighted)
        rows.append(
            MethodScores(
                method=method_label(scheme, kind),
                brier_unweighted=columns[ScoreKind.BRIER][0],
                brier_weighted=columns[ScoreKind.BRIER][1],
                log_unweighted=columns[ScoreKind.LOG][0],
                log_weighted=columns[ScoreKind.LOG][1],
            )
        )
    return ScoreTable(rows=tuple(rows), n_questions=len(pairs))


def mean_brier_loss(
    corpus: Iterable[tuple[ForecastStream, Question]],
    scheme: WeightingScheme,
    kind: AggregateKind,
) -> float:
    """Mean quadratic loss (p - X)^2 of one method across all questions
    and evaluation times; lower is better.  Cells with no forecasts yet
    are skipped."""
    total = 0.0
    cells = 0
    for stream, question in sorted(corpus, key=lambda pair: pair[1].question_id):
        if not question.is_resolved:
            raise UnresolvedQuestion(f"question {question.question_id!r} is unresolved")
        for cutoff in eval_times(question):
            try:
                value = aggregate_at_time(stream, cutoff, scheme, kind)
            except NoForecastsYet:
                continue
            total += (value - question.resolution) ** 2
            cells += 1
    if cells == 0:
        raise NoForecastsYet("no (question, evaluation time) cell had any forecasts")
    return total / cells
