import math
from datetime import timedelta

import numpy as np
import pytest

from helpers import EPOCH, mk_stream
from kairosis import (
    LOG_CLAMP_EPS,
    AggregateKind,
    DegenerateBenchmark,
    Kairosis,
    NoForecastsYet,
    Question,
    ScoreKind,
    TimeWeighting,
    Uniform,
    UnresolvedQuestion,
    eval_times,
    mean_brier_loss,
    method_label,
    raw_score,
    score_report,
    score_table,
    skill_score,
    standard_methods,
    time_aggregated_skill,
)


# --- proper scores -----------------------------------------------------------


def test_brier_example():
    got = raw_score(ScoreKind.BRIER, 1, 0.7)
    # -(0.7 - 1)^2; allow one ulp of slack for the squared difference
    assert got == pytest.approx(-0.09, abs=2e-16)


def test_brier_symmetry_and_range():
    assert raw_score(ScoreKind.BRIER, 0, 0.5) == pytest.approx(-0.25)
    assert raw_score(ScoreKind.BRIER, 1, 0.5) == pytest.approx(-0.25)
    assert raw_score(ScoreKind.BRIER, 1, 1.0) == 0.0
    assert raw_score(ScoreKind.BRIER, 1, 0.0) == pytest.approx(-1.0)


def test_log_score_examples():
    assert raw_score(ScoreKind.LOG, 1, 0.5) == pytest.approx(math.log(0.5), abs=1e-12)
    assert raw_score(ScoreKind.LOG, 0, 0.25) == pytest.approx(math.log(0.75), abs=1e-12)


def test_log_score_clamps_extremes():
    # certainty is clamped away from the boundary instead of returning -inf
    lo = raw_score(ScoreKind.LOG, 1, 0.0)
    assert lo == pytest.approx(math.log(LOG_CLAMP_EPS), abs=1e-9)
    hi = raw_score(ScoreKind.LOG, 0, 1.0)
    assert hi == pytest.approx(math.log(LOG_CLAMP_EPS), abs=1e-9)
    assert math.isfinite(lo) and math.isfinite(hi)


def test_raw_score_is_nonpositive_and_oracle_optimal():
    rng = np.random.default_rng(1)
    for kind in ScoreKind:
        for p in rng.uniform(0, 1, size=50):
            for x in (0, 1):
                assert raw_score(kind, x, float(p)) <= 0.0
    assert raw_score(ScoreKind.BRIER, 1, 1.0) == 0.0
    assert raw_score(ScoreKind.BRIER, 0, 0.0) == 0.0


def test_raw_score_requires_resolution():
    with pytest.raises(UnresolvedQuestion):
        raw_score(ScoreKind.BRIER, None, 0.5)


# --- skill -------------------------------------------------------------------


def test_skill_score_example():
    assert skill_score(ScoreKind.BRIER, 1, 0.9, 0.5) == pytest.approx(0.96)


def test_skill_score_identities():
    # matching the benchmark scores zero, a perfect forecast scores one
    assert skill_score(ScoreKind.BRIER, 1, 0.5, 0.5) == 0.0
    assert skill_score(ScoreKind.BRIER, 1, 1.0, 0.5) == pytest.approx(1.0)
    # worse than the benchmark goes negative
    assert skill_score(ScoreKind.BRIER, 1, 0.25, 0.5) < 0.0


def test_skill_score_rejects_perfect_benchmark():
    with pytest.raises(DegenerateBenchmark):
        skill_score(ScoreKind.BRIER, 1, 0.7, 1.0)


def test_skill_score_equals_one_minus_score_ratio():
    # the normalized form (S - S0) / (0 - S0) == 1 - S/S0 for both kinds
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = float(rng.uniform(0.05, 0.95))
        p0 = float(rng.uniform(0.05, 0.95))
        x = int(rng.integers(0, 2))
        for kind in ScoreKind:
            s = raw_score(kind, x, p)
            s0 = raw_score(kind, x, p0)
            want = 1.0 - s / s0
            assert skill_score(kind, x, p, p0) == pytest.approx(want, abs=1e-12)


def test_skill_score_monotone_in_forecast_quality():
    ps = np.linspace(0.05, 0.95, 19)
    skills = [skill_score(ScoreKind.BRIER, 1, float(p), 0.5) for p in ps]
    assert all(a < b for a, b in zip(skills, skills[1:]))


# --- evaluation times ----------------------------------------------------------


def test_eval_times_quarters():
    q = Question("q", EPOCH, EPOCH + timedelta(days=4), 1)
    ts = eval_times(q)
    assert ts == (
        EPOCH + timedelta(days=1),
        EPOCH + timedelta(days=2),
        EPOCH + timedelta(days=3),
    )


def test_time_aggregated_skill_examples():
    skills = (0.1, 0.2, 0.3)
    flat = time_aggregated_skill(skills, TimeWeighting.UNWEIGHTED_OVER_TIME)
    assert flat == pytest.approx(0.2, abs=1e-12)
    sloped = time_aggregated_skill(skills, TimeWeighting.WEIGHTED_OVER_TIME)
    assert sloped == pytest.approx(1 / 6, abs=1e-12)


def test_time_aggregated_skill_needs_three_values():
    with pytest.raises(ValueError):
        time_aggregated_skill((0.1, 0.2), TimeWeighting.UNWEIGHTED_OVER_TIME)
    with pytest.raises(ValueError):
        time_aggregated_skill(
            (0.1, float("nan"), 0.3), TimeWeighting.UNWEIGHTED_OVER_TIME
        )


# --- reports and tables ---------------------------------------------------------


def _resolved_question(stream, outcome=1):
    return Question(stream.question_id, stream.open_time, stream.close_time, outcome)


def test_method_labels():
    assert method_label(Uniform(), AggregateKind.WEIGHTED_MEDIAN) == "uniform+median"
    assert method_label(Kairosis(), AggregateKind.WEIGHTED_MEAN) == "kairosis+mean"


def test_standard_methods_cover_grid():
    methods = standard_methods()
    labels = [method_label(s, k) for s, k in methods]
    assert len(labels) == 8
    assert len(set(labels)) == 8
    assert "uniform+median" in labels


def test_score_report_single_question():
    stream = mk_stream([0.8] * 8, gap_days=0.4)
    question = _resolved_question(stream)
    report = score_report(
        stream, question, Uniform(), AggregateKind.WEIGHTED_MEDIAN, ScoreKind.BRIER
    )
    assert report.question_id == stream.question_id
    # the method IS the benchmark, so every populated slot has zero skill
    for slot in (report.early, report.middle, report.late):
        if slot is not None:
            assert slot == pytest.approx(0.0, abs=1e-12)


def test_score_report_missing_early_slot():
    # only one forecast, placed late in the window: early slots have no data
    stream = mk_stream([0.9], gap_days=3.0)
    question = Question(
        stream.question_id, stream.open_time, stream.open_time + timedelta(days=4), 1
    )
    report = score_report(
        stream, question, Uniform(), AggregateKind.WEIGHTED_MEDIAN, ScoreKind.BRIER
    )
    assert report.early is None
    assert report.middle is None
    assert report.late == pytest.approx(0.0, abs=1e-12)
    # means renormalize over the populated slots
    assert report.unweighted == pytest.approx(0.0, abs=1e-12)
    assert report.weighted == pytest.approx(0.0, abs=1e-12)


def test_score_table_benchmark_row_is_zero():
    rng = np.random.default_rng(6)
    pairs = []
    for i in range(3):
        stream = mk_stream(rng.uniform(0, 1, size=12), question_id=f"q{i}")
        pairs.append((stream, _resolved_question(stream, outcome=int(i % 2))))
    table = score_table(pairs, standard_methods())
    row = table.row("uniform+median")
    for key, value in row.as_dict().items():
        if key != "method":
            assert value == pytest.approx(0.0, abs=1e-12)
    assert table.n_questions == 3
    assert len(table.rows) == 8  # one row per method, kinds as columns


def test_score_table_requires_resolved_questions():
    stream = mk_stream([0.5] * 4)
    question = Question(stream.question_id, stream.open_time, stream.close_time)
    with pytest.raises(UnresolvedQuestion):
        score_table([(stream, question)], standard_methods())


def test_score_table_unknown_method_row():
    stream = mk_stream([0.5] * 4)
    table = score_table([(stream, _resolved_question(stream))], standard_methods())
    with pytest.raises(KeyError):
        table.row("nonsense+median")


def test_mean_brier_loss_constant_stream():
    stream = mk_stream([0.8] * 10)
    question = _resolved_question(stream, outcome=1)
    loss = mean_brier_loss(
        [(stream, question)], Uniform(), AggregateKind.WEIGHTED_MEDIAN
    )
    assert loss == pytest.approx(0.04, abs=1e-12)


def test_mean_brier_loss_no_cells():
    # single forecast arriving after the last evaluation time
    stream = mk_stream([0.5], gap_days=3.5)
    question = Question(
        stream.question_id, stream.open_time, stream.open_time + timedelta(days=4), 1
    )
    with pytest.raises(NoForecastsYet):
        mean_brier_loss([(stream, question)], Uniform(), AggregateKind.WEIGHTED_MEDIAN)
