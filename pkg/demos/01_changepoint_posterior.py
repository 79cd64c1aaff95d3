"""
Locating the most recent change in a forecast stream
====================================================

A stream holds 120 forecasts near 0.3 and then jumps to 80 near 0.9.
The change-point posterior should pile its mass right after the jump.
"""

import numpy as np

from kairosis import (
    KairosisParams,
    RegimeSpec,
    SyntheticSpec,
    WithinBin,
    changepoint_posterior,
    generate_stream,
    kairos_weights,
    single_bin,
)

# a reproducible two-regime stream; forecasts scatter uniformly inside
# their probability bin so the pre-change segment has some texture
spec = SyntheticSpec(
    regimes=(
        RegimeSpec(
            length=120,
            bin_probs=(0.45, 0.45, 0.1, 0.0, 0.0),
            within_bin=WithinBin.UNIFORM_IN_BIN,
        ),
        RegimeSpec(
            length=80,
            bin_probs=single_bin(4, 5),
            within_bin=WithinBin.UNIFORM_IN_BIN,
        ),
    ),
    seed=7,
    question_id="demo",
)
stream, question, true_changepoints = generate_stream(spec)
print(f"stream of {len(stream)} forecasts, true change at t={true_changepoints[0]}")

# posterior over the change-point candidates t = 1..N
posterior = changepoint_posterior(stream, KairosisParams(bins=5, p=1 / 6))
print(f"posterior mode at t={posterior.argmax_t}")

top = np.argsort(posterior.mass)[::-1][:5]
print("top five candidates:")
for t in sorted(int(i) + 1 for i in top):
    print(f"  t={t:3d}  mass={posterior.mass[t - 1]:.4f}")

# the cumulative mass is the weight each forecast gets in the aggregate:
# forecasts before the change are worth almost nothing
cmf = kairos_weights(posterior).weights
for t in (1, 60, 115, 125, 150, 200):
    print(f"  weight of forecast {t:3d}: {cmf[t - 1]:.4f}")
