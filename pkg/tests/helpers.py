"""Shared construction helpers for the test suite."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from kairosis import ForecastStream, validate_stream

EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


def mk_stream(probabilities, gap_days: float = 1.0, question_id: str = "q") -> ForecastStream:
    """A stream with the given probabilities at regular calendar gaps,
    opening one gap before the first forecast and closing one after the
    last."""
    values = [float(p) for p in probabilities]
    raw = [
        (EPOCH + timedelta(days=(i + 1) * gap_days), p) for i, p in enumerate(values)
    ]
    return validate_stream(
        raw,
        open_time=EPOCH,
        close_time=EPOCH + timedelta(days=(len(raw) + 1) * gap_days),
        question_id=question_id,
    )
