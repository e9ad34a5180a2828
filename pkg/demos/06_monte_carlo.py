"""Streaming Monte-Carlo moments and the baseline they provide.

The single-pass accumulator digests the sample stream chunk by chunk, so the
memory footprint is independent of the sample count, and a fixed seed makes
the whole estimate reproducible bit for bit.
"""

import numpy as np

from segpc import ishigami_model, monte_carlo_moments

model = ishigami_model()

print("Ishigami QoI, growing Monte-Carlo budgets (seed 123):\n")
print(f"{'n':>9} {'mean':>9} {'std':>9} {'skew':>8} {'kurt':>8}")
for n in (10**3, 10**4, 10**5, 10**6):
    report, trace = monte_carlo_moments(model.space, model, n, seed=123)
    print(f"{n:>9} {report.mean:9.4f} {report.std:9.4f} "
          f"{report.skewness:8.4f} {report.kurtosis:8.4f}")

print("\nreference values:    3.5000    3.7208   0.0000   3.5072")
print("\nthe per-sample trace supports any downstream statistic, e.g. the")
report, trace = monte_carlo_moments(model.space, model, 10**5, seed=123)
quantiles = np.quantile(trace, [0.05, 0.5, 0.95])
print(f"5%/50%/95% quantiles from the trace: {np.round(quantiles, 3)}")
