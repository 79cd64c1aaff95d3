"""
Four ways to weight a forecast stream
=====================================

The same stream aggregated with uniform weights, change-point weights,
a recent-fraction cutoff, and exponential decay.  When the stream jumps,
the schemes disagree: uniform hangs on to stale forecasts, the others
let go at different speeds.
"""

import numpy as np

from kairosis import (
    AggregateKind,
    ExponentialDecay,
    Kairosis,
    KairosisParams,
    RecentFraction,
    Uniform,
    compute_weights,
    validate_stream,
    weighted_mean,
    weighted_median,
)
from datetime import datetime, timedelta, timezone

# forty forecasts a day apart: thirty around 0.25, then a jump to 0.85
rng = np.random.default_rng(13)
values = np.concatenate(
    [
        np.clip(rng.normal(0.25, 0.04, size=30), 0, 1),
        np.clip(rng.normal(0.85, 0.04, size=10), 0, 1),
    ]
)
epoch = datetime(2024, 1, 1, tzinfo=timezone.utc)
stream = validate_stream(
    [(epoch + timedelta(days=i + 1), float(p)) for i, p in enumerate(values)],
    open_time=epoch,
    close_time=epoch + timedelta(days=41),
    question_id="jump",
)

schemes = (
    Uniform(),
    Kairosis(KairosisParams(bins=5, p=1 / 6)),
    RecentFraction(0.2),
    ExponentialDecay(1 / 20),
)

print(f"{'scheme':<10} {'median':>8} {'mean':>8}   weight on the last 10 forecasts")
for scheme in schemes:
    w = compute_weights(stream, scheme)
    med = weighted_median(stream.probabilities, w)
    mean = weighted_mean(stream.probabilities, w)
    tail = w[-10:].sum()
    print(f"{scheme.label:<10} {med:8.3f} {mean:8.3f}   {tail:6.1%}")

# the aggregate the package recommends: change-point weighted median
best = weighted_median(
    stream.probabilities, compute_weights(stream, schemes[1])
)
print(f"\nchange-point weighted median after the jump: {best:.3f}")
print(f"plain median over the whole stream:          {np.median(values):.3f}")
