"""Configuration for the change-point weighting."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = ["AlphaMode", "KairosisParams"]


class AlphaMode(Enum):
    """How pre-change pseudo-counts scale with the candidate location t.

    REMAINING_COUNT sets every pre-change pseudo-count to max(N - t, 1):
    the number of forecasts after the candidate, floored at one to keep
    the Dirichlet parameters positive.  ELAPSED_COUNT instead grows them
    with the length of the pre-change segment, scale * max(t - 1, 1).
    """

    REMAINING_COUNT = "remaining"
    ELAPSED_COUNT = "elapsed"


@dataclass(frozen=True)
class KairosisParams:
    """Parameters of the change-point posterior.

    bins        number of equal-width probability bins (K >= 1)
    p           per-gap change rate of the geometric prior, 0 < p < 1
    alpha_after post-change pseudo-count, same for every bin
    alpha_mode  pre-change pseudo-count schedule
    alpha_scale proportionality constant, used only in ELAPSED_COUNT mode
    """

    bins: int = 5
    p: float = 1.0 / 6.0
    alpha_after: float = 1.0
    alpha_mode: AlphaMode = AlphaMode.REMAINING_COUNT
    alpha_scale: float = 1.0

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.alpha_after <= 0.0:
            raise ValueError(f"alpha_after must be positive, got {self.alpha_after}")
        if self.alpha_scale <= 0.0:
            raise ValueError(f"alpha_scale must be positive, got {self.alpha_scale}")
