"""
Perturbed weights approach the proportional law
===============================================

Hazard exponents ``c_i (1 + d_i / (1 + x)) / x`` differ from a shared tail by
a vanishing factor. As players are added, the winner law drifts toward
``c_i / b_n``.
"""

# %%
import numpy as np

from argmaxlaw import (PerturbedFamily, alpha_weights, approximation_error, golden_offsets,
                       power_tail, rational_perturbation, total_variation, winner_probs_exact)


def family(n):
    # offsets spread over [-0.5, 1] by the golden-ratio sequence
    return PerturbedFamily(np.ones(n), power_tail(1.0), rational_perturbation(golden_offsets(n)))


# %%
# Worst relative error and total variation against the proportional weights.
for n in (10, 100, 1000):
    fam = family(n)
    p = winner_probs_exact(fam).probs
    print(f"n={n:5d}  max rel err={approximation_error(fam):.6f}"
          f"  TV={total_variation(p, alpha_weights(fam)):.6f}")

# %%
# With two players the perturbation is far from negligible.
small = PerturbedFamily([1, 2], power_tail(1.0), rational_perturbation([0.5, -0.3]))
print("n=2 exact:", winner_probs_exact(small).probs, "vs weights", alpha_weights(small))
