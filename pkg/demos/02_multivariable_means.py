# %% [markdown]
# # Geometric means of several matrices
#
# ALM and BMP are symmetrization recursions, the Karcher mean solves
# ``sum w_i log(X^{-1/2} A_i X^{-1/2}) = 0`` and the power means ``P_t``
# interpolate from harmonic (t = -1) through Karcher (t -> 0) to arithmetic
# (t = 1).

# %%
import numpy as np

from opmeans import (
    MeanKind,
    alm_mean,
    bmp_mean,
    check_property,
    karcher_mean,
    log_euclidean_mean,
    power_mean,
    thompson_distance,
)
from opmeans.spd_core import loewner_leq, random_spd_tuple

mats = random_spd_tuple(3, 3, cond=50, seed=1)
w = np.array([0.2, 0.3, 0.5])

# %% [markdown]
# Three geometric means of the same triple.  They agree on commuting
# inputs but not in general.

# %%
G_alm = alm_mean(mats)
G_bmp = bmp_mean(None, mats)
G_k = karcher_mean(None, mats)
print("d(ALM, BMP)     =", thompson_distance(G_alm, G_bmp))
print("d(BMP, Karcher) =", thompson_distance(G_bmp, G_k))

# %% [markdown]
# The power-mean chain, weighted.

# %%
ts = [-1, -0.5, -0.1, 0.1, 0.5, 1]
chain = [power_mean(t, w, mats) for t in ts[:3]] + [karcher_mean(w, mats)] + [power_mean(t, w, mats) for t in ts[3:]]
print("chain increasing:", all(loewner_leq(a, b, 1e-8) for a, b in zip(chain, chain[1:])))
L = karcher_mean(w, mats)
for t in (0.1, 0.02, 0.01):
    print(f"d(P_{t}, Karcher) = {thompson_distance(power_mean(t, w, mats), L):.2e}")

# %% [markdown]
# Properties as predicates.  The Karcher mean satisfies all ten; the
# arithmetic end of the power family does not multiply on commuting inputs
# (P1) or respect determinants (P9).

# %%
for label in ("karcher", "power:1"):
    kind = MeanKind.parse(label)
    res = {p: check_property(p, kind, w, mats, seed=3, tol=1e-8).passed for p in ("P1", "P3", "P7", "P9", "P10")}
    print(label, res)

# %% [markdown]
# The log-Euclidean mean ``exp(sum w_i log A_i)`` is cheap but not monotone.

# %%
from opmeans._witnesses import LOG_EUCLIDEAN_P4_A, LOG_EUCLIDEAN_P4_B

A0 = [np.array(a) for a in LOG_EUCLIDEAN_P4_A]
B0 = [np.array(b) for b in LOG_EUCLIDEAN_P4_B]
print("A_i <= B_i:", all(loewner_leq(a, b) for a, b in zip(A0, B0)))
print("G_E(A) <= G_E(B):", loewner_leq(log_euclidean_mean(None, A0), log_euclidean_mean(None, B0)))
