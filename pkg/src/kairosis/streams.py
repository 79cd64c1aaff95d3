"""Domain types for forecast streams and questions.

Forecasts are indexed in forecaster time: the i-th forecast of a stream has
index i, running 1..N, regardless of calendar spacing.  All types are
immutable after validation; downstream computation is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyStream, EmptyWindow, ProbabilityOutOfRange, TimestampOutOfWindow

__all__ = ["Forecast", "ForecastStream", "Question", "validate_stream", "as_utc"]


def as_utc(ts: datetime) -> datetime:
    """Normalize a datetime to UTC; naive datetimes are taken to be UTC."""
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class Forecast:
    """A single submitted probability at a calendar instant."""

    timestamp: datetime
    probability: float

    def __post_init__(self):
        p = float(self.probability)
        if not (0.0 <= p <= 1.0) or p != p:
            raise ProbabilityOutOfRange(self.probability)
        object.__setattr__(self, "probability", p)
        object.__setattr__(self, "timestamp", as_utc(self.timestamp))


@dataclass(frozen=True)
class ForecastStream:
    """Time-ordered forecasts for one question.

    Forecasts are sorted non-decreasing by timestamp; simultaneous
    timestamps keep their construction order.  Every timestamp lies in
    ``[open_time, close_time]``.
    """

    question_id: str
    forecasts: tuple[Forecast, ...]
    open_time: datetime
    close_time: datetime

    def __post_init__(self):
        object.__setattr__(self, "open_time", as_utc(self.open_time))
        object.__setattr__(self, "close_time", as_utc(self.close_time))
        if not self.forecasts:
            raise EmptyStream(f"stream {self.question_id!r} has no forecasts")
        prev = None
        for f in self.forecasts:
            if not (self.open_time <= f.timestamp <= self.close_time):
                raise TimestampOutOfWindow(f.timestamp, self.open_time, self.close_time)
            if prev is not None and f.timestamp < prev:
                raise ValueError("forecasts are not sorted by timestamp")
            prev = f.timestamp

    def __len__(self) -> int:
        return len(self.forecasts)

    @property
    def probabilities(self) -> np.ndarray:
        return np.fromiter(
            (f.probability for f in self.forecasts), dtype=float, count=len(self.forecasts)
        )

    @property
    def timestamps(self) -> tuple[datetime, ...]:
        return tuple(f.timestamp for f in self.forecasts)

    def until(self, cutoff: datetime) -> tuple[Forecast, ...]:
        """Forecasts submitted at or before ``cutoff``, in forecaster order."""
        cutoff = as_utc(cutoff)
        return tuple(f for f in self.forecasts if f.timestamp <= cutoff)


@dataclass(frozen=True)
class Question:
    """Question window and (optional) binary resolution.

    ``resolution`` is 0, 1, or None while unresolved.
    """

    question_id: str
    open_time: datetime
    close_time: datetime
    resolution: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "open_time", as_utc(self.open_time))
        object.__setattr__(self, "close_time", as_utc(self.close_time))
        if self.close_time <= self.open_time:
            raise EmptyWindow(
                f"question {self.question_id!r}: close {self.close_time} "
                f"not after open {self.open_time}"
            )
        if self.resolution not in (None, 0, 1):
            raise ValueError(f"resolution must be 0, 1 or None, got {self.resolution!r}")

    @property
    def is_resolved(self) -> bool:
        return self.resolution is not None


def validate_stream(
    raw: Iterable[tuple[datetime, float]] | Sequence[tuple[datetime, float]],
    open_time: datetime,
    close_time: datetime,
    question_id: str = "question",
) -> ForecastStream:
    """Build a validated stream from (timestamp, probability) pairs.

    Pairs are stably sorted by timestamp, so ties keep their input order;
    forecaster-time indices are then 1..N in that order.

    Raises EmptyStream, ProbabilityOutOfRange or TimestampOutOfWindow.
    """
    forecasts = [Forecast(ts, p) for ts, p in raw]
    if not forecasts:
        raise EmptyStream(f"no forecasts supplied for {question_id!r}")
    forecasts.sort(key=lambda f: f.timestamp)
    return ForecastStream(
        question_id=question_id,
        forecasts=tuple(forecasts),
        open_time=open_time,
        close_time=close_time,
    )
