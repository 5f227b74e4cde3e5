# %% [markdown]
# # Small-lambda equivalences
#
# For Hermitian ``T_i`` and an operator monotone ``f`` with ``f(1) = 1``,
# ``sum w_i T_i <= 0`` decides whether a mean of ``f(lam T_i + I)`` stays
# below the identity as ``lam -> 0``.  The lab evaluates both sides on the
# dyadic grid 2^-4 ... 2^-20 and reports each implication separately.

# %%
import numpy as np

from opmeans import harmonic, power
from opmeans import theorem_lab as tl

# %% [markdown]
# Two matrices: ``(1 - w) A <= w B`` against ``f(lam A + I) sigma f(-lam B + I) <= I``.

# %%
sigma = harmonic(0.4)
for satisfy in (True, False):
    A, B = tl.random_thm31_pair(0.4, 3, 11, satisfy)
    r = tl.verify_theorem31(power(0.5), sigma, A, B)
    print(r.notes[0])
    print("   worst slack", f"{r.worst_slack:.3e}", " implications", r.directions)

# %% [markdown]
# Several matrices, with the BMP mean as the functional.  The boundary
# case ``lambda_max(sum w_i T_i) = 0`` is reported separately.

# %%
phi = tl.Functional.parse("bmp")
for mode in ("negative", "boundary", "positive"):
    T = tl.random_hermitian_tuple(3, 2, None, 7, mode)
    r = tl.verify_extension_theorem(phi, power(0.5), T, sandwich_trials=1, x_samples=16)
    print(f"{mode:>9}: passed={r.passed}  {r.notes[0]}")

# %% [markdown]
# Limits: ``f(lam A + I)^{1/lam} -> exp(f'(1) A)`` at rate ``O(lam)``.

# %%
rng = np.random.default_rng(2)
A = rng.standard_normal((2, 2))
A = (A + A.T) / 4
r = tl.verify_limit_formulas(power(0.5), A, np.diag([1.0, 3.0]), np.diag([2.0, 0.5]), 0.5)
for row in r.grid_data[::4]:
    print(f"lam={row['lambda']:.1e}  f-limit err {row['error_f_limit']:.2e}  p-limit err {row['error_p_limit']:.2e}")
