"""Command-line interface.

Subcommands: ``aggregate`` (one question at one instant), ``backtest``
(the full method-by-score table over a corpus), ``sweep`` (mean quadratic
loss of the change-point method across a grid of prior rates p), and
``synth`` (realize a synthetic corpus from a JSON spec).

Exit codes: 0 success; 2 usage errors (bad flags or values); 3 file and
parse errors; 4 domain errors (no forecasts at the cutoff, unresolved or
unknown questions, and similar).  Warnings and progress go to standard
error; the only data on standard output is the aggregate probability
printed by ``aggregate``.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from .aggregation import (
    AggregateKind,
    ExponentialDecay,
    Kairosis,
    RecentFraction,
    Uniform,
    aggregate_at_time,
    compute_weights,
)
from .changepoint import changepoint_posterior, kairos_weights
from .errors import (
    DuplicateQuestionId,
    InvalidSpec,
    KairosisError,
    MissingHeader,
    ParseError,
    TimestampOutOfWindow,
)
from .io import (
    load_corpus,
    load_forecasts,
    load_questions,
    pair_with_questions,
    parse_instant,
    write_artifacts,
    write_forecasts_csv,
    write_questions_csv,
    write_truth_csv,
)
from .params import AlphaMode, KairosisParams
from .scoring import mean_brier_loss, score_table, standard_methods
from .streams import ForecastStream
from .synthetic import generate_stream, load_spec_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_DOMAIN = 4

logger = logging.getLogger(__name__)

_FILE_ERRORS = (
    OSError,
    MissingHeader,
    ParseError,  # includes out-of-range probabilities in files
    DuplicateQuestionId,
    InvalidSpec,
    TimestampOutOfWindow,
)


def _fraction_or_float(token: str) -> float:
    """Parse '0.25' or '1/6'."""
    token = token.strip()
    if "/" in token:
        num, _, den = token.partition("/")
        return float(num) / float(den)
    return float(token)


def parse_p_grid(text: str) -> list[float]:
    """Parse a --p-grid value: a comma list of rates (plain decimals or
    fractions like 1/6), or ``log:LOW:HIGH:COUNT`` for a log-spaced grid."""
    text = text.strip()
    if not text:
        raise ValueError("empty p grid")
    if text.startswith("log:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"log grid must look like log:LOW:HIGH:COUNT, got {text!r}")
        low, high = _fraction_or_float(parts[1]), _fraction_or_float(parts[2])
        count = int(parts[3])
        if count < 1:
            raise ValueError(f"log grid needs at least one point, got {count}")
        if not (0.0 < low < 1.0 and 0.0 < high < 1.0):
            raise ValueError(f"grid endpoints must lie in (0, 1), got {low}, {high}")
        return [float(p) for p in np.geomspace(low, high, count)]
    grid = [_fraction_or_float(tok) for tok in text.split(",") if tok.strip()]
    if not grid:
        raise ValueError("empty p grid")
    return grid


def _add_param_flags(parser: argparse.ArgumentParser, with_p: bool = True):
    group = parser.add_argument_group("change-point parameters")
    group.add_argument("--bins", type=int, default=5, help="probability bins K (default 5)")
    if with_p:
        group.add_argument(
            "--p",
            type=_fraction_or_float,
            default=1.0 / 6.0,
            help="geometric prior rate (default 1/6; fractions like 1/6 accepted)",
        )
    group.add_argument(
        "--alpha-mode",
        choices=[mode.value for mode in AlphaMode],
        default=AlphaMode.REMAINING_COUNT.value,
        help="pre-change pseudo-count schedule (default remaining)",
    )
    group.add_argument(
        "--alpha-scale",
        type=float,
        default=1.0,
        help="scale for the elapsed pseudo-count mode (default 1)",
    )
    group.add_argument(
        "--alpha-after",
        type=float,
        default=1.0,
        help="post-change pseudo-count per bin (default 1)",
    )


def _add_method_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("baseline parameters")
    group.add_argument(
        "--fraction",
        type=float,
        default=0.2,
        help="recent fraction kept by the recent weighting (default 0.2)",
    )
    group.add_argument(
        "--decay-p",
        type=_fraction_or_float,
        default=1.0 / 20.0,
        help="rate of the exponential-decay weighting (default 1/20)",
    )


def _params_from_args(args) -> KairosisParams:
    return KairosisParams(
        bins=args.bins,
        p=getattr(args, "p", 1.0 / 6.0),
        alpha_after=args.alpha_after,
        alpha_mode=AlphaMode(args.alpha_mode),
        alpha_scale=args.alpha_scale,
    )


def _scheme_from_args(args, params: KairosisParams):
    if args.weighting == "uniform":
        return Uniform()
    if args.weighting == "kairosis":
        return Kairosis(params)
    if args.weighting == "recent":
        return RecentFraction(args.fraction)
    return ExponentialDecay(args.decay_p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kairosis",
        description="Change-point-weighted aggregation of probability forecast streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    agg = sub.add_parser(
        "aggregate", help="aggregate one question's forecasts at an instant"
    )
    agg.add_argument("--forecasts", required=True, help="forecasts CSV")
    agg.add_argument("--questions", help="optional questions CSV for the true window")
    agg.add_argument("--question", required=True, help="question id to aggregate")
    agg.add_argument("--at", required=True, help="cutoff instant (ISO-8601)")
    agg.add_argument(
        "--weighting",
        choices=("uniform", "kairosis", "recent", "expdecay"),
        default="kairosis",
    )
    agg.add_argument("--aggregate", choices=("median", "mean"), default="median")
    agg.add_argument("--out", help="directory for posterior/weight CSVs (omit to skip)")
    _add_param_flags(agg)
    _add_method_flags(agg)
    agg.set_defaults(func=cmd_aggregate)

    back = sub.add_parser("backtest", help="score all methods over a resolved corpus")
    back.add_argument("--forecasts", required=True)
    back.add_argument("--questions", required=True)
    back.add_argument("--out", required=True, help="directory for scores.csv/scores.json")
    _add_param_flags(back)
    _add_method_flags(back)
    back.set_defaults(func=cmd_backtest)

    swp = sub.add_parser(
        "sweep", help="mean quadratic loss of kairosis+median across prior rates"
    )
    swp.add_argument("--forecasts", required=True)
    swp.add_argument("--questions", required=True)
    swp.add_argument("--out", required=True, help="directory for sweep.csv")
    swp.add_argument(
        "--p-grid",
        required=True,
        help="comma list of rates (fractions allowed) or log:LOW:HIGH:COUNT",
    )
    _add_param_flags(swp, with_p=False)
    swp.set_defaults(func=cmd_sweep)

    syn = sub.add_parser("synth", help="realize a synthetic corpus from a JSON spec")
    syn.add_argument("--spec", required=True, help="spec JSON (one object or an array)")
    syn.add_argument("--out", required=True, help="directory for the corpus CSVs")
    syn.add_argument(
        "--seed",
        type=int,
        help="override seeds: question i uses seed+i in file order",
    )
    syn.set_defaults(func=cmd_synth)

    return parser


def cmd_aggregate(args) -> int:
    cutoff = parse_instant(args.at)
    params = _params_from_args(args)
    scheme = _scheme_from_args(args, params)
    kind = AggregateKind(args.aggregate)

    streams = load_forecasts(args.forecasts)
    if args.questions:
        questions = load_questions(args.questions)
        if args.question not in questions:
            logger.error("question %r not present in %s", args.question, args.questions)
            return EXIT_DOMAIN
        question = questions[args.question]
        if not question.open_time <= cutoff <= question.close_time:
            raise TimestampOutOfWindow(cutoff, question.open_time, question.close_time)
        pairs = {
            s.question_id: s
            for s, _ in pair_with_questions(streams, questions)
        }
        streams = pairs
    if args.question not in streams:
        logger.error("question %r not present in %s", args.question, args.forecasts)
        return EXIT_DOMAIN
    stream = streams[args.question]

    value = aggregate_at_time(stream, cutoff, scheme, kind)
    print(repr(value))

    if args.out:
        kept = stream.until(cutoff)
        restricted = ForecastStream(
            question_id=stream.question_id,
            forecasts=kept,
            open_time=stream.open_time,
            close_time=stream.close_time,
        )
        posteriors = {}
        if isinstance(scheme, Kairosis):
            posteriors[stream.question_id] = changepoint_posterior(restricted, params)
            weights = kairos_weights(posteriors[stream.question_id]).normalized()
        else:
            weights = compute_weights(restricted, scheme)
        write_artifacts(
            args.out,
            posteriors=posteriors,
            weights={stream.question_id: (restricted, weights)},
        )
    return EXIT_OK


def cmd_backtest(args) -> int:
    corpus = load_corpus(args.forecasts, args.questions)
    if not corpus:
        logger.error("no question has both forecasts and a question row")
        return EXIT_DOMAIN
    params = _params_from_args(args)
    methods = standard_methods(params, fraction=args.fraction, decay_p=args.decay_p)
    table = score_table(corpus, methods)
    write_artifacts(args.out, table=table)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = parse_p_grid(args.p_grid)
    corpus = load_corpus(args.forecasts, args.questions)
    if not corpus:
        logger.error("no question has both forecasts and a question row")
        return EXIT_DOMAIN
    base = _params_from_args(args)
    rows = []
    for p in sorted(set(grid)):
        params = dataclasses.replace(base, p=p)
        loss = mean_brier_loss(corpus, Kairosis(params), AggregateKind.WEIGHTED_MEDIAN)
        rows.append((p, loss))
        logger.info("p=%g mean quadratic loss %.6f", p, loss)
    write_artifacts(args.out, sweep=rows)
    return EXIT_OK


def cmd_synth(args) -> int:
    specs = load_spec_file(args.spec)
    if args.seed is not None:
        specs = [
            dataclasses.replace(spec, seed=(int(args.seed) + i) % 2**64)
            for i, spec in enumerate(specs)
        ]
    streams, questions, truth = [], [], {}
    for spec in specs:
        stream, question, changepoints = generate_stream(spec)
        streams.append(stream)
        questions.append(question)
        truth[spec.question_id] = changepoints
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_forecasts_csv(out / "forecasts.csv", streams)
    write_questions_csv(out / "questions.csv", questions)
    write_truth_csv(out / "truth.csv", truth)
    return EXIT_OK


def run(argv=None) -> int:
    """Parse arguments and execute; returns the process exit code."""
    logging.basicConfig(
        stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except _FILE_ERRORS as exc:
        logger.error("%s", exc)
        return EXIT_FILE
    except KairosisError as exc:
        logger.error("%s", exc)
        return EXIT_DOMAIN


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
