# %% [markdown]
# # Means integrated over the simplex
#
# Averaging a weighted mean ``M(w; A)`` over all weights ``w`` (flat
# Dirichlet) gives an n-variable logarithmic mean ``L(M)``.  For n = 2 and
# the geometric family this is the usual logarithmic mean.

# %%
import math

import numpy as np

from opmeans import m_logarithmic_mean, mean_family, simplex_rule, verify_logmean_inequalities
from opmeans.spd_core import random_spd_tuple

# %%
rule = simplex_rule(2, "gauss", level=8)
a, b = 2.0, 7.0
got = m_logarithmic_mean(mean_family("karcher"), [a * np.eye(1), b * np.eye(1)], rule)[0, 0]
print(f"L = {got:.10f}   (b - a) / log(b / a) = {(b - a) / math.log(b / a):.10f}")

# %% [markdown]
# Quadrature on the 2-simplex: stick-breaking Gauss versus Monte Carlo.
# Both integrate the first moment ``E[w_1] = 1/3``.

# %%
for r in (simplex_rule(3, "gauss", level=6), simplex_rule(3, "montecarlo", count=4096, seed=5)):
    print(f"{r.scheme:>32}: {len(r):5d} nodes, E[w_1] = {r.integrate(r.nodes[:, 0]):.6f}")

# %% [markdown]
# The chain ``H <= L(M0) <= L(M) <= A`` for the BMP family, where ``M0``
# feeds cyclic shifts of the weight back through ``M``.

# %%
mats = random_spd_tuple(2, 3, cond=30, seed=4)
report = verify_logmean_inequalities(mean_family("bmp"), mats, simplex_rule(3, level=4, symmetrize="cyclic"))
for row in report.grid_data:
    print(f"{row['link']:>12}: slack {row['slack']:.3e}")
