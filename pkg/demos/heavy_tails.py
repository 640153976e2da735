"""
Tails too heavy for floating point
==================================

With ``nu(x) = 1 / log(1 + x)`` about one draw in seven hundred exceeds ``1e300``.
Both exact routes freeze each player's share of the summed exponent at the
edge of the float range, and the tolerance estimate carries the bound.
"""

# %%
import numpy as np

from argmaxlaw import (GenericFamily, estimate_winner_probs, winner_probs_exact,
                       winner_probs_product)

fam = GenericFamily([lambda x: 1.0 / np.log1p(x), lambda x: 3.0 / x, lambda x: x ** -0.5])
a, b = winner_probs_exact(fam), winner_probs_product(fam)
print("basic formula:", a.probs, f"(mass above 1e300: {a.diagnostics['mass_beyond_x_max']:.2e})")
print("product form :", b.probs)
print("routes differ by", f"{np.abs(a.probs - b.probs).max():.1e}")

# %%
# Sampling returns ``inf`` for draws past the float range; with a single
# heavy player that never produces an ambiguous maximum.
mc = estimate_winner_probs(fam, draws=2 * 10 ** 5, seed=17)
print("monte carlo  :", mc.probs_hat, "ties:", mc.ties)
