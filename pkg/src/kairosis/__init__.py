"""Change-point-weighted aggregation of probability forecast streams.

A stream of probability forecasts for a binary question is weighted by
the posterior probability that the most recent change in the forecast
distribution happened at or before each forecast; the weighted median of
the forecasts is the aggregate.  The package also ships the uniform,
recent-fraction, and exponential-decay baseline weightings, proper-score
evaluation against the uniform median, and a seeded synthetic stream
generator for benchmarking.
"""

from .aggregation import (
    AggregateKind,
    ExponentialDecay,
    Kairosis,
    RecentFraction,
    Uniform,
    WeightingScheme,
    aggregate_at_time,
    compute_weights,
    weighted_mean,
    weighted_median,
)
from .changepoint import (
    KairosWeights,
    PosteriorMass,
    alpha_before,
    bin_counts,
    bin_index,
    changepoint_posterior,
    entropy_limit,
    kairos_weights,
    log_dirichlet_categorical,
    log_geometric_prior,
)
from .errors import (
    DegenerateBenchmark,
    DuplicateQuestionId,
    EmptyCounts,
    EmptyStream,
    EmptyWindow,
    InvalidSpec,
    KairosisError,
    LengthMismatch,
    MissingHeader,
    NoForecastsYet,
    NonPositiveAlpha,
    ParseError,
    ProbabilityOutOfRange,
    TimestampOutOfWindow,
    UnnormalizedWeights,
    UnresolvedQuestion,
)
from .io import (
    FORECAST_HEADER,
    QUESTION_HEADER,
    format_float,
    load_corpus,
    load_forecasts,
    load_questions,
    pair_with_questions,
    parse_instant,
    write_artifacts,
    write_forecasts_csv,
    write_posterior_csv,
    write_questions_csv,
    write_scores_csv,
    write_scores_json,
    write_sweep_csv,
    write_truth_csv,
    write_weights_csv,
)
from .params import AlphaMode, KairosisParams
from .scoring import (
    LOG_CLAMP_EPS,
    MethodScores,
    ScoreKind,
    ScoreReport,
    ScoreTable,
    TimeWeighting,
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
from .streams import Forecast, ForecastStream, Question, validate_stream
from .synthetic import (
    FixedResolution,
    FromLastRegimeMean,
    PoissonGaps,
    RecoveryReport,
    RegimeSpec,
    SyntheticSpec,
    UniformGaps,
    WithinBin,
    benchmark_suite,
    flat_suite,
    generate_stream,
    load_spec_file,
    recovery_report,
    single_bin,
    spec_from_json,
    spec_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateKind",
    "AlphaMode",
    "DegenerateBenchmark",
    "DuplicateQuestionId",
    "EmptyCounts",
    "EmptyStream",
    "EmptyWindow",
    "ExponentialDecay",
    "FixedResolution",
    "Forecast",
    "ForecastStream",
    "FORECAST_HEADER",
    "FromLastRegimeMean",
    "InvalidSpec",
    "Kairosis",
    "KairosisError",
    "KairosisParams",
    "KairosWeights",
    "LengthMismatch",
    "LOG_CLAMP_EPS",
    "MethodScores",
    "MissingHeader",
    "NoForecastsYet",
    "NonPositiveAlpha",
    "ParseError",
    "PoissonGaps",
    "PosteriorMass",
    "ProbabilityOutOfRange",
    "Question",
    "QUESTION_HEADER",
    "RecentFraction",
    "RecoveryReport",
    "RegimeSpec",
    "ScoreKind",
    "ScoreReport",
    "ScoreTable",
    "SyntheticSpec",
    "TimestampOutOfWindow",
    "TimeWeighting",
    "Uniform",
    "UniformGaps",
    "UnnormalizedWeights",
    "UnresolvedQuestion",
    "WeightingScheme",
    "WithinBin",
    "aggregate_at_time",
    "alpha_before",
    "benchmark_suite",
    "bin_counts",
    "bin_index",
    "changepoint_posterior",
    "compute_weights",
    "entropy_limit",
    "eval_times",
    "flat_suite",
    "format_float",
    "generate_stream",
    "kairos_weights",
    "load_corpus",
    "load_forecasts",
    "load_questions",
    "load_spec_file",
    "log_dirichlet_categorical",
    "log_geometric_prior",
    "mean_brier_loss",
    "method_label",
    "pair_with_questions",
    "parse_instant",
    "raw_score",
    "recovery_report",
    "score_report",
    "score_table",
    "single_bin",
    "skill_score",
    "spec_from_json",
    "spec_to_json",
    "standard_methods",
    "time_aggregated_skill",
    "validate_stream",
    "weighted_mean",
    "weighted_median",
    "write_artifacts",
    "write_forecasts_csv",
    "write_posterior_csv",
    "write_questions_csv",
    "write_scores_csv",
    "write_scores_json",
    "write_sweep_csv",
    "write_truth_csv",
    "write_weights_csv",
]
