"""
Weights that depend on the line-up size
=======================================

With ``c_in = g(i / n)`` any density on ``[0, 1]`` can appear as the limit of
``A_n / n``; it is ``g`` normalised.
"""

# %%
import numpy as np

from argmaxlaw import BUILTIN_G, TriangularFamily, empirical_limit_cdf, triangular_limit

grid = np.linspace(0, 1, 101)
for name in ("linear", "tent", "sqrt"):
    g = BUILTIN_G[name]
    limit = triangular_limit(g)
    fam = TriangularFamily(g, 10 ** 4)
    dev = np.abs(empirical_limit_cdf(fam, grid) - limit.cdf(grid)).max()
    print(f"g={name:6s} integral={limit.g_integral:.4f}  b_n/n={fam.weights.sum() / fam.n:.4f}"
          f"  max cdf gap={dev:.1e}")
