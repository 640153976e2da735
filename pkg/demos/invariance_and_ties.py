"""
Relabelling values, and what ties do
====================================

Applying one increasing map to every player changes nothing about who wins.
Discrete draws are different: ties are common, so we count every player that
reaches the maximum.
"""

# %%
import numpy as np

from argmaxlaw import (bernoulli_max_membership, bernoulli_membership_exact,
                       transform_invariance_check, weibull_family)

fam = weibull_family([1, 2], 1.0)
for label, f, f_inv in (("x^3", lambda x: x ** 3, np.cbrt),
                        ("2x", lambda x: 2 * x, lambda y: y / 2),
                        ("log(1+x)", np.log1p, np.expm1)):
    same = transform_invariance_check(fam, f, f_inv, draws=10 ** 4, seed=3)
    print(f"f={label:9s} same winner on every path: {same}")

# %%
# Five Bernoulli(0.3) players: player 1 is among the maxima with
# probability p + (1 - p)**n.
est = bernoulli_max_membership(0.3, 5, draws=10 ** 6, seed=42)
print(f"estimate {est:.5f}  expected {bernoulli_membership_exact(0.3, 5):.5f}")
