"""
Where in the line-up does the winner sit?
=========================================

Rescale the winner index to ``A_n / n``. The growth of ``b_n = c_1 + ... + c_n``
decides its limit: a power law ``x**rho``, or a point mass at an end.
"""

# %%
import math

import numpy as np

from argmaxlaw import b_from_log_weights, classify_limit, empirical_limit_cdf, estimate_rho

n = 10 ** 5
grid = np.linspace(0, 1, 11)

# %%
# Power weights ``c_i = i**s`` give ``b_n`` of index ``s + 1``.
for s in (0, 1, 2):
    F = empirical_limit_cdf(np.arange(1, n + 1, dtype=float) ** s, grid)
    lw = s * np.log(np.arange(1, 2 * n + 2, dtype=float))
    est = estimate_rho(log_b=b_from_log_weights(lw), n_max=n)
    print(f"s={s}: rho_hat={est.rho_hat:.4f}  max|F - x^{s + 1}|="
          f"{np.abs(F - grid ** (s + 1)).max():.1e}")

# %%
# Doubling weights pile the winner onto the last players; harmonic weights
# onto the first. ``e^sqrt(n)`` grows slowly enough that ``b_{n+1}/b_n -> 1``
# yet still ends at the top.
cases = {
    "2^i": dict(log_b=b_from_log_weights(np.arange(1, 2 * n + 2) * math.log(2))),
    "1/i": dict(log_b=b_from_log_weights(-np.log(np.arange(1, 2 * n + 2, dtype=float)))),
    "e^sqrt(n)": dict(log_b=math.sqrt),
}
for name, kw in cases.items():
    est = estimate_rho(n_max=n, **kw)
    lim = classify_limit(est)
    print(f"{name:10s} rho_hat={est.rho_hat:<8.4g} ratio condition={est.ratio_condition_holds!s:5s}"
          f" -> {lim.kind}")
