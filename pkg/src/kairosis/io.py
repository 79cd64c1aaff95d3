"""CSV loading and artifact writing.

Input formats (strict; a parse error anywhere rejects the whole file):

* forecasts: header ``question_id,timestamp,probability``; timestamps are
  ISO-8601 (a trailing ``Z`` or an explicit offset; naive times are taken
  as UTC); probabilities are plain decimals in [0, 1].
* questions: header ``question_id,open_time,close_time,resolution`` with
  resolution one of ``0``, ``1``, ``unresolved``.

Extra columns beyond the required ones are ignored with a warning.

Output artifacts: ``posterior_<qid>.csv`` (t, mass, cmf),
``weights_<qid>.csv`` (index, timestamp, weight), ``scores.csv`` and
``scores.json`` (one row per method), ``sweep.csv`` (p, mean_brier), plus
the corpus writers used by the synthetic generator.  Floats are written
with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .changepoint import PosteriorMass
from .errors import (
    DuplicateQuestionId,
    MissingHeader,
    ParseError,
    ProbabilityOutOfRange,
)
from .scoring import ScoreTable
from .streams import ForecastStream, Question, validate_stream

__all__ = [
    "FORECAST_HEADER",
    "QUESTION_HEADER",
    "parse_instant",
    "format_float",
    "load_forecasts",
    "load_questions",
    "load_corpus",
    "pair_with_questions",
    "write_posterior_csv",
    "write_weights_csv",
    "write_scores_csv",
    "write_scores_json",
    "write_sweep_csv",
    "write_forecasts_csv",
    "write_questions_csv",
    "write_truth_csv",
    "write_artifacts",
]

logger = logging.getLogger(__name__)

FORECAST_HEADER = ("question_id", "timestamp", "probability")
QUESTION_HEADER = ("question_id", "open_time", "close_time", "resolution")

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


def parse_instant(text: str) -> datetime:
    """Parse an ISO-8601 instant to a UTC datetime.

    Accepts a trailing ``Z``, an explicit offset, or a naive time (taken
    to be UTC).  Raises ValueError on anything else.
    """
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_float(value: float) -> str:
    """17-significant-digit decimal form; round-trips any finite double."""
    return f"{value:.17g}"


def _format_instant(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def _read_rows(path, header: Sequence[str]):
    """Yield (line_number, row) for each data row, enforcing the header
    and a consistent column count; extra columns warn once."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            first = next(reader)
        except StopIteration:
            raise MissingHeader(f"{path}: file is empty") from None
        names = [c.strip() for c in first]
        if tuple(names[: len(header)]) != tuple(header):
            raise MissingHeader(
                f"{path}: expected header {','.join(header)}, got {','.join(names)}"
            )
        if len(names) > len(header):
            logger.warning(
                "%s: ignoring extra columns %s", path, names[len(header):]
            )
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < len(header):
                raise ParseError(line, f"expected {len(header)} columns, got {len(row)}")
            yield line, row


def _parse_probability(text: str, line: int) -> float:
    s = text.strip()
    if not _NUMBER.match(s):
        raise ParseError(line, f"probability {text!r} is not a plain decimal")
    value = float(s)
    if not 0.0 <= value <= 1.0:
        raise ProbabilityOutOfRange(text.strip(), line)
    return value


def _parse_row_instant(text: str, line: int, what: str) -> datetime:
    try:
        return parse_instant(text)
    except ValueError:
        raise ParseError(line, f"{what} {text!r} is not an ISO-8601 instant") from None


def load_forecasts(path) -> dict[str, ForecastStream]:
    """Load all forecast streams of a file, keyed by question id.

    Streams get provisional windows spanning exactly their own
    timestamps; pair them with a question table (``pair_with_questions``)
    to re-validate against the authoritative windows.
    """
    grouped: dict[str, list[tuple[datetime, float]]] = {}
    for line, row in _read_rows(path, FORECAST_HEADER):
        qid = row[0].strip()
        if not qid:
            raise ParseError(line, "empty question_id")
        ts = _parse_row_instant(row[1], line, "timestamp")
        prob = _parse_probability(row[2], line)
        grouped.setdefault(qid, []).append((ts, prob))
    streams = {}
    for qid, raw in grouped.items():
        stamps = [ts for ts, _ in raw]
        streams[qid] = validate_stream(
            raw, open_time=min(stamps), close_time=max(stamps), question_id=qid
        )
    return streams


def load_questions(path) -> dict[str, Question]:
    """Load a question table keyed by question id."""
    questions: dict[str, Question] = {}
    for line, row in _read_rows(path, QUESTION_HEADER):
        qid = row[0].strip()
        if not qid:
            raise ParseError(line, "empty question_id")
        if qid in questions:
            raise DuplicateQuestionId(f"line {line}: question {qid!r} appears twice")
        open_time = _parse_row_instant(row[1], line, "open_time")
        close_time = _parse_row_instant(row[2], line, "close_time")
        if close_time <= open_time:
            raise ParseError(line, f"close_time {row[2]!r} not after open_time {row[1]!r}")
        raw = row[3].strip()
        if raw == "unresolved":
            resolution = None
        elif raw in ("0", "1"):
            resolution = int(raw)
        else:
            raise ParseError(line, f"resolution must be 0, 1 or unresolved, got {raw!r}")
        questions[qid] = Question(
            question_id=qid,
            open_time=open_time,
            close_time=close_time,
            resolution=resolution,
        )
    return questions


def pair_with_questions(
    streams: Mapping[str, ForecastStream], questions: Mapping[str, Question]
) -> list[tuple[ForecastStream, Question]]:
    """Match streams to questions and rebuild each stream against its
    question's window (raising TimestampOutOfWindow on inconsistency).

    Ids present on only one side are skipped with a warning; pairs come
    back sorted by question id.
    """
    pairs = []
    for qid in sorted(set(streams) | set(questions)):
        if qid not in questions:
            logger.warning("question %s has forecasts but no question row; skipped", qid)
            continue
        if qid not in streams:
            logger.warning("question %s has no forecasts; skipped", qid)
            continue
        question = questions[qid]
        stream = ForecastStream(
            question_id=qid,
            forecasts=streams[qid].forecasts,
            open_time=question.open_time,
            close_time=question.close_time,
        )
        pairs.append((stream, question))
    return pairs


def load_corpus(forecasts_path, questions_path) -> list[tuple[ForecastStream, Question]]:
    """Load and pair both files in one call."""
    return pair_with_questions(load_forecasts(forecasts_path), load_questions(questions_path))


def write_posterior_csv(path, posterior: PosteriorMass) -> Path:
    """Change-point posterior as rows (t, mass, cmf), t = 1..N."""
    path = Path(path)
    cmf = np.cumsum(posterior.mass)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("t", "mass", "cmf"))
        for t, (mass, total) in enumerate(zip(posterior.mass, cmf), start=1):
            writer.writerow((t, format_float(mass), format_float(total)))
    return path


def write_weights_csv(path, stream: ForecastStream, weights) -> Path:
    """Per-forecast aggregation weights as rows (index, timestamp, weight)."""
    path = Path(path)
    weights = np.asarray(weights, dtype=float)
    if weights.size != len(stream):
        raise ValueError(
            f"{weights.size} weights for a stream of {len(stream)} forecasts"
        )
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("index", "timestamp", "weight"))
        for i, (forecast, weight) in enumerate(zip(stream.forecasts, weights), start=1):
            writer.writerow((i, _format_instant(forecast.timestamp), format_float(weight)))
    return path


def _table_cell(value: float) -> str:
    return format_float(value) if math.isfinite(value) else "nan"


def write_scores_csv(path, table: ScoreTable) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ("method", "brier_unweighted", "brier_weighted", "log_unweighted", "log_weighted")
        )
        for row in table.rows:
            writer.writerow(
                (
                    row.method,
                    _table_cell(row.brier_unweighted),
                    _table_cell(row.brier_weighted),
                    _table_cell(row.log_unweighted),
                    _table_cell(row.log_weighted),
                )
            )
    return path


def write_scores_json(path, table: ScoreTable) -> Path:
    path = Path(path)
    payload = {
        "benchmark": table.benchmark,
        "n_questions": table.n_questions,
        "rows": [
            {
                key: (value if not isinstance(value, float) or math.isfinite(value) else None)
                for key, value in row.as_dict().items()
            }
            for row in table.rows
        ],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, allow_nan=False)
        handle.write("\n")
    return path


def write_sweep_csv(path, rows: Iterable[tuple[float, float]]) -> Path:
    """Sweep results as rows (p, mean_brier), sorted by p ascending."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("p", "mean_brier"))
        for p, mean_brier in sorted(rows):
            writer.writerow((format_float(p), format_float(mean_brier)))
    return path


def write_forecasts_csv(path, streams: Iterable[ForecastStream]) -> Path:
    """Corpus of streams in the forecasts input format, ordered by
    question id then forecaster time."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(FORECAST_HEADER)
        for stream in sorted(streams, key=lambda s: s.question_id):
            for forecast in stream.forecasts:
                writer.writerow(
                    (
                        stream.question_id,
                        _format_instant(forecast.timestamp),
                        format_float(forecast.probability),
                    )
                )
    return path


def write_questions_csv(path, questions: Iterable[Question]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(QUESTION_HEADER)
        for question in sorted(questions, key=lambda q: q.question_id):
            writer.writerow(
                (
                    question.question_id,
                    _format_instant(question.open_time),
                    _format_instant(question.close_time),
                    "unresolved" if question.resolution is None else question.resolution,
                )
            )
    return path


def write_truth_csv(path, changepoints: Mapping[str, Sequence[int]]) -> Path:
    """True change points per question as rows
    (question_id, changepoints), the indices semicolon-separated."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("question_id", "changepoints"))
        for qid in sorted(changepoints):
            writer.writerow((qid, ";".join(str(int(t)) for t in changepoints[qid])))
    return path


def write_artifacts(
    out_dir,
    *,
    posteriors: Mapping[str, PosteriorMass] | None = None,
    weights: Mapping[str, tuple[ForecastStream, Sequence[float]]] | None = None,
    table: ScoreTable | None = None,
    sweep: Iterable[tuple[float, float]] | None = None,
) -> list[Path]:
    """Write whichever artifacts are supplied into ``out_dir`` and return
    the paths written; an empty call writes nothing (and creates nothing)."""
    out_dir = Path(out_dir)
    if not posteriors and not weights and table is None and sweep is None:
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for qid in sorted(posteriors or {}):
        written.append(write_posterior_csv(out_dir / f"posterior_{qid}.csv", posteriors[qid]))
    for qid in sorted(weights or {}):
        stream, values = weights[qid]
        written.append(write_weights_csv(out_dir / f"weights_{qid}.csv", stream, values))
    if table is not None:
        written.append(write_scores_csv(out_dir / "scores.csv", table))
        written.append(write_scores_json(out_dir / "scores.json", table))
    if sweep is not None:
        written.append(write_sweep_csv(out_dir / "sweep.csv", sweep))
    return written
