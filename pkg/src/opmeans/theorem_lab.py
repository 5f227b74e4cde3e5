"""Numerical experiments for the inequalities and equivalences about operator means.

"For all sufficiently small lambda" is operationalized as "for every value of
a dyadic :class:`LambdaGrid` at or below its threshold" (default: every
``2**-k`` with ``8 <= k <= 20``).  Each experiment returns a
:class:`~opmeans.report.VerdictReport` whose ``directions`` record both
implications of the equivalence being tested: the forward implication must
hold on every input, and the converse is exercised constructively (inputs
violating the hypothesis must produce a detected violation of the
conclusion).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kubo_ando as ka
from .kubo_ando import ReprFunction, binary_mean, repr_derivative_at_one, screening_grid
from .log_mean import m_logarithmic_mean, mean_family, simplex_rule
from .multi_means import (
    ConvergenceError,
    MeanKind,
    SolverConfig,
    arithmetic_mean,
    as_weights,
    evaluate,
    harmonic_mean,
    karcher_mean,
    log_euclidean_mean,
)
from .report import VerdictReport
from .spd_core import (
    as_spd,
    as_sym,
    expm,
    logm,
    loewner_leq,
    loewner_slack,
    matrix_map,
    random_orthogonal,
    random_psd,
    random_spd,
    random_sym,
    spectral_norm,
)

LAMBDA_STAR = 2.0 ** -8
CONCLUSION_TOL = 1e-10
BOUNDARY_TOL = 1e-9
HYPOTHESIS_TOL = 1e-6


@dataclass(frozen=True)
class LambdaGrid:
    values: tuple = tuple(2.0 ** -k for k in range(4, 21))
    threshold: float = LAMBDA_STAR

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size == 0 or np.any(v <= 0) or np.any(np.diff(v) >= 0):
            raise ValueError("grid values must be positive and strictly decreasing")

    @property
    def small(self) -> list[float]:
        """Grid values at or below the threshold."""
        return [float(x) for x in self.values if x <= self.threshold]


def _f_of(f: ReprFunction, T, lam: float):
    """``f(lam*T + I)``, or ``None`` when ``lam*T + I`` is not positive definite."""
    X = lam * as_sym(T) + np.eye(np.shape(T)[0])
    if np.linalg.eigvalsh(X)[0] <= 0:
        return None
    return matrix_map(X, f.eval, f.name)


def _lmax(A) -> float:
    return float(np.linalg.eigvalsh(as_sym(A))[-1])


# ---------------------------------------------------------------------------
# Lemma: f'(1) = w  <=>  harmonic_w <= f <= arithmetic_w pointwise


def _sandwich_slacks(values, t, w):
    lower = 1.0 / ((1 - w) + w / t)
    upper = (1 - w) + w * t
    lo = (values - lower) / np.maximum(1.0, np.abs(values))
    hi = (upper - values) / np.maximum(1.0, np.abs(upper))
    return lo, hi


def verify_lemma2(f: ReprFunction, w: float | None = None, points: int = 1000,
                  tol: float = 1e-12, probe_offset: float = 1e-2) -> VerdictReport:
    """Check ``[(1-w) + w/t]^{-1} <= f(t) <= (1-w) + w t`` with ``w = f'(1)`` and the converse.

    Slacks are relative, divided by ``max(1, |bound|)``.  The converse is
    checked for the supplied ``w`` (sandwich at ``w`` implies ``f'(1) = w``)
    and constructively: the sandwich must fail at ``f'(1) +- probe_offset``.
    """
    wd = repr_derivative_at_one(f)
    t = screening_grid(points)
    vals = np.asarray(f.eval(t), dtype=float)
    lo, hi = _sandwich_slacks(vals, t, wd)
    worst = float(min(lo.min(), hi.min()))
    directions = {"(1)=>(2)": worst >= -tol}

    w_sup = wd if w is None else float(w)
    lo_s, hi_s = _sandwich_slacks(vals, t, w_sup)
    holds = bool(min(lo_s.min(), hi_s.min()) >= -tol)
    directions["(2)=>(1)"] = (not holds) or abs(wd - w_sup) <= ka.FD_TOL
    probes = []
    for wp in (wd - probe_offset, wd + probe_offset):
        if 0 < wp < 1:
            lo_p, hi_p = _sandwich_slacks(vals, t, wp)
            rejected = bool(min(lo_p.min(), hi_p.min()) < -tol)
            probes.append({"w": wp, "rejected": rejected})
    directions["wrong weights rejected"] = all(p["rejected"] for p in probes)
    return VerdictReport(
        test=f"lemma2 [{f.name}]",
        directions=directions,
        worst_slack=worst,
        grid_data=[
            {"bound": "lower", "w": wd, "min_slack": float(lo.min()), "max_slack": float(lo.max())},
            {"bound": "upper", "w": wd, "min_slack": float(hi.min()), "max_slack": float(hi.max())},
            {"supplied_w": w_sup, "sandwich_holds": holds},
            *probes,
        ],
    )


# ---------------------------------------------------------------------------
# (1-w)A <= wB  <=>  f(lam A + I) sigma f(-lam B + I) <= I for small lam


def verify_theorem31(f: ReprFunction, sigma: ReprFunction, A, B, grid: LambdaGrid | None = None,
                     tol: float = CONCLUSION_TOL, hyp_tol: float = HYPOTHESIS_TOL) -> VerdictReport:
    """Test both directions of the two-variable weight equivalence at ``w = sigma'(1)``.

    The first-order prediction of the excess ``lambda_max(M - I)`` is
    ``lam * f'(1) * lambda_max((1-w)A - wB)``; it is recorded per grid point.
    """
    grid = grid or LambdaGrid()
    if f.is_constant or sigma.is_constant:
        raise ValueError("f and sigma must be non-constant")
    w = repr_derivative_at_one(sigma)
    fd = repr_derivative_at_one(f)
    A = as_sym(A)
    B = as_sym(B)
    D = (1 - w) * A - w * B
    hyp = loewner_leq((1 - w) * A, w * B, hyp_tol)
    coeff = fd * _lmax(D)
    rows, excesses, skipped = [], [], []
    I = np.eye(A.shape[0])
    for lam in grid.small:
        X = _f_of(f, A, lam)
        Y = _f_of(f, -B, lam)
        if X is None or Y is None:
            skipped.append(lam)
            continue
        M = binary_mean(sigma, X, Y)
        ex = _lmax(M - I)
        excesses.append(ex)
        rows.append({"lambda": lam, "excess": ex, "excess_over_lambda": ex / lam, "first_order": coeff * lam})
    if not excesses:
        raise ValueError("no grid value keeps I + lam*A and I - lam*B positive definite")
    concl = max(excesses) <= tol
    report = VerdictReport(
        test=f"thm31 [f={f.name}, sigma={sigma.name}]",
        directions={"(1)=>(2)": (not hyp) or concl, "(2)=>(1)": (not concl) or hyp},
        worst_slack=-max(excesses),
        grid_data=rows,
    )
    report.notes.append(f"hypothesis {'holds' if hyp else 'fails'}; w = {w!r}; first-order coefficient {coeff!r}")
    if skipped:
        report.notes.append(f"skipped lambda values (lost positivity): {skipped}")
    if not report.passed:
        report.witness = {"A": A, "B": B, "w": w}
    return report


def random_thm31_pair(w: float, dim: int, seed, satisfy: bool, margin: float = 0.1, scale: float = 1.0):
    """Random symmetric ``(A, B)`` with ``(1-w)A <= wB`` (``satisfy``) or violating it.

    Violating pairs have ``lambda_max((1-w)A - wB) >= margin``.
    """
    rng = np.random.default_rng(seed)
    A = random_sym(dim, rng, scale)
    P = random_psd(dim, rng, scale=scale)
    if satisfy:
        D = -P
    else:
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        D = random_sym(dim, rng, 0.3 * scale)
        D += (margin + max(0.0, -float(v @ D @ v)) + rng.uniform(0, scale)) * np.outer(v, v)
    B = ((1 - w) * A - D) / w
    return A, (B + B.T) / 2


# ---------------------------------------------------------------------------
# converse: the mean inequality for all hypothesis-satisfying pairs forces sigma'(1) = w


def verify_prop_converse(sigma: ReprFunction, w: float, samples: int = 16, seed=0,
                         grid: LambdaGrid | None = None, tol: float = 1e-12,
                         match_tol: float = 1e-3) -> VerdictReport:
    """Probe ``A = w t I``, ``B = (1-w) t I`` (which satisfy ``(1-w)A <= wB``).

    With ``x = f(1 + lam t w)`` and ``y = f(1 - lam t (1-w))`` the mean is
    ``x * sigma(y/x)``; to first order its excess over 1 is
    ``lam * t * f'(1) * (w - sigma'(1))``.  When ``sigma'(1)`` differs from
    ``w`` some probe must exceed 1; when it matches none may.
    """
    grid = grid or LambdaGrid()
    if sigma.is_constant:
        raise ValueError("sigma must be non-constant")
    w = float(w)
    if not 0 < w < 1:
        raise ValueError("w must lie in (0, 1)")
    phi1 = repr_derivative_at_one(sigma)
    matches = abs(phi1 - w) <= match_tol
    rng = np.random.default_rng(seed)
    fs = [ka.power(0.5), ka.logarithmic(), ka.arithmetic(0.5), ka.harmonic(0.5), ka.power(0.9)]
    rows, witness, worst = [], None, np.inf
    for k in range(samples):
        f = fs[k % len(fs)]
        t = (1.0 if k % 2 == 0 else -1.0) * float(rng.uniform(0.5, 2.0))
        best = -np.inf
        for lam in grid.small:
            x = float(f(np.array([1 + lam * t * w]))[0])
            y = float(f(np.array([1 - lam * t * (1 - w)]))[0])
            m = x * float(sigma(np.array([y / x]))[0])
            ex = m - 1.0
            if ex > best:
                best = ex
            if ex > tol and witness is None:
                witness = {"f": f.name, "t": t, "lambda": lam, "excess": ex}
        worst = min(worst, -best)
        rows.append({"f": f.name, "t": t, "max_excess": best})
    found = witness is not None
    if matches:
        directions = {"derivative matches": True, "no violation": not found}
    else:
        directions = {"derivative mismatch detected": found}
    return VerdictReport(
        test=f"converse [sigma={sigma.name}, w={w:g}]",
        directions=directions,
        worst_slack=float(worst),
        witness=witness,
        grid_data=rows,
        notes=[f"sigma'(1) = {phi1!r}"],
    )


# ---------------------------------------------------------------------------
# limit formulas


def _monotone_tail(errors, tail=8) -> bool:
    e = errors[-tail:]
    return all(b <= a for a, b in zip(e, e[1:]))


def verify_limit_formulas(f: ReprFunction, A, B, C, w: float, grid: LambdaGrid | None = None,
                          final_tol: float = 1e-5, tail: int = 8) -> VerdictReport:
    """Errors of ``f(lam A + I)^{1/lam} -> exp(f'(1) A)`` and of the p-mean limit
    ``[(1-w) B^p + w C^p]^{1/p} -> exp((1-w) log B + w log C)`` over the whole grid.

    Each limit passes when its errors are non-increasing over the last
    ``tail`` grid points and the final error is at most ``final_tol``.
    """
    grid = grid or LambdaGrid()
    A = as_sym(A)
    B = as_spd(B)
    C = as_spd(C)
    fd = repr_derivative_at_one(f)
    target1 = expm(fd * A)
    target2 = expm((1 - w) * logm(B) + w * logm(C))
    rows, e1, e2 = [], [], []
    I = np.eye(A.shape[0])
    for lam in grid.values:
        lam = float(lam)
        X = lam * A + I
        if np.linalg.eigvalsh(X)[0] > 0:
            F = matrix_map(X, lambda x: np.exp(np.log(f.eval(x)) / lam), "f^(1/lam)")
            err1 = spectral_norm(F - target1)
        else:
            err1 = np.inf
        # (1-w) B^p + w C^p = I + E; forming E directly avoids the cancellation
        # in B^p - I that 1/p would otherwise amplify to ~1e-16 / p
        E = (1 - w) * matrix_map(B, lambda x: np.expm1(lam * np.log(x))) \
            + w * matrix_map(C, lambda x: np.expm1(lam * np.log(x)))
        err2 = spectral_norm(matrix_map(E, lambda x: np.exp(np.log1p(x) / lam)) - target2)
        e1.append(err1)
        e2.append(err2)
        rows.append({"lambda": lam, "error_f_limit": err1, "error_p_limit": err2})
    d1 = _monotone_tail(e1, tail) and e1[-1] <= final_tol
    d2 = _monotone_tail(e2, tail) and e2[-1] <= final_tol
    return VerdictReport(
        test=f"limits [f={f.name}, w={w:g}]",
        directions={"f(lam A + I)^(1/lam) -> exp(f'(1) A)": d1, "p-mean -> log-Euclidean": d2},
        worst_slack=float(final_tol - max(e1[-1], e2[-1])),
        grid_data=rows,
    )


# ---------------------------------------------------------------------------
# extension theorem: sum w_i T_i <= 0  <=>  Phi(w; f(lam T_i + I); x) <= 1


FUNCTIONAL_TAGS = ("power", "norm-product", "alm", "bmp", "log-euclidean", "log-karcher")


@dataclass(frozen=True)
class Functional:
    """Functional ``Phi(w, A, x) >= 0`` of a weight, an SPD tuple and a unit vector.

    All tags except ``norm-product`` are quadratic forms ``<M(w; A) x, x>``;
    ``norm-product`` is ``prod_i <A_i x, x>^{w_i}``.  ``alm`` and
    ``log-karcher`` ignore non-uniform weights and reject them.
    """

    tag: str
    t: float | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    level: int = 6

    def __post_init__(self):
        if self.tag not in FUNCTIONAL_TAGS:
            raise ValueError(f"unknown functional {self.tag!r}; expected one of {FUNCTIONAL_TAGS}")
        if self.tag == "power":
            MeanKind("power", self.t)

    @property
    def label(self) -> str:
        return f"power:{self.t:g}" if self.tag == "power" else self.tag

    @property
    def uniform_only(self) -> bool:
        return self.tag in ("alm", "log-karcher")

    @classmethod
    def parse(cls, text: str) -> "Functional":
        tag, _, arg = text.strip().lower().replace("_", "-").partition(":")
        return cls(tag, float(arg) if arg else None)

    def operator(self, w, A):
        """The operator ``M(w; A)`` of a quadratic-form functional; ``None`` for norm-product."""
        if self.tag == "norm-product":
            return None
        if self.tag == "log-karcher":
            rule = simplex_rule(len(A), "gauss", level=self.level)
            fam = mean_family(MeanKind("karcher", solver=self.solver))
            return m_logarithmic_mean(fam, A, rule, threads=1)
        kind = MeanKind(self.tag, self.t, self.solver)
        return evaluate(kind, None if self.tag == "alm" else w, A)

    def values(self, w, A, X, operator=None):
        """Values at every column of ``X`` (unit vectors)."""
        if self.tag == "norm-product":
            quad = np.array([np.einsum("ij,ij->j", X, a @ X) for a in A])
            return np.prod(np.maximum(quad, 0.0) ** np.asarray(w)[:, None], axis=0)
        M = self.operator(w, A) if operator is None else operator
        return np.einsum("ij,ij->j", X, M @ X)

    def __call__(self, w, A, x):
        x = np.asarray(x, dtype=float).reshape(-1, 1)
        return float(self.values(np.asarray(w, dtype=float), A, x)[0])


def _unit_vectors(dim, count, rng):
    X = rng.standard_normal((dim, count))
    return X / np.linalg.norm(X, axis=0)


def _sandwich_precheck(phi, n, dim, w_fixed, trials, x_samples, rng):
    """``||H|| <= sup_x Phi <= ||A||`` on random SPD tuples; returns (lower, upper) worst slacks."""
    lower, upper = np.inf, np.inf
    for _ in range(trials):
        mats = [random_spd(dim, float(np.exp(rng.uniform(0, np.log(100)))), rng) for _ in range(n)]
        w = w_fixed if w_fixed is not None else rng.dirichlet(np.ones(n))
        H = harmonic_mean(w, mats)
        Ar = arithmetic_mean(w, mats)
        cands = [_unit_vectors(dim, x_samples, rng), np.linalg.eigh(H)[1], np.linalg.eigh(Ar)[1]]
        M = phi.operator(w, mats)
        if M is not None:
            cands.append(np.linalg.eigh(M)[1])
        sup = float(np.max(phi.values(w, mats, np.hstack(cands), operator=M)))
        nH, nA = spectral_norm(H), spectral_norm(Ar)
        lower = min(lower, (sup - nH) / max(1.0, nH))
        upper = min(upper, (nA - sup) / max(1.0, nA))
    return lower, upper


def verify_extension_theorem(phi: Functional, f: ReprFunction, T, w=None, grid: LambdaGrid | None = None,
                             x_samples: int = 64, seed=0, sandwich_trials: int = 3,
                             tol: float = CONCLUSION_TOL, boundary_tol: float = BOUNDARY_TOL) -> VerdictReport:
    """Check the hypothesis ``||H|| <= sup Phi <= ||A||`` and the equivalence
    ``sum_i w_i T_i <= 0  <=>  Phi(w; f(lam T_1 + I), ...; x) <= 1``.

    ``sup`` over unit vectors is approximated by ``x_samples`` Haar-random
    vectors plus the eigenvectors of the arithmetic and harmonic means (and
    of ``M(w; A)`` for quadratic forms).  The conclusion is evaluated at
    every small grid value on the same random vectors plus the eigenvectors
    of ``sum_i w_i T_i`` and of the evaluated operator.  When the top
    eigenvalue of ``sum_i w_i T_i`` is zero (boundary case) the conclusion
    tolerance widens to ``boundary_tol``.
    """
    grid = grid or LambdaGrid()
    if f.is_constant:
        raise ValueError("f must be non-constant")
    T = [as_sym(t) for t in T]
    n, dim = len(T), T[0].shape[0]
    w = as_weights(w, n)
    if phi.uniform_only and not np.allclose(w, 1.0 / n, rtol=0, atol=1e-12):
        raise ValueError(f"functional {phi.label} needs uniform weights")
    rng = np.random.default_rng(seed)
    fd = repr_derivative_at_one(f)

    lower, upper = _sandwich_precheck(phi, n, dim, w if phi.uniform_only else None,
                                      sandwich_trials, x_samples, rng)

    S = sum(wk * tk for wk, tk in zip(w, T))
    top = _lmax(S)
    scale = max(1.0, spectral_norm(S))
    hyp = top <= 1e-12 * scale
    boundary = abs(top) <= 1e-12 * scale
    ctol = boundary_tol if boundary else tol
    base_x = np.hstack([_unit_vectors(dim, x_samples, rng), np.linalg.eigh(S)[1]])
    rows, excesses = [], []
    for lam in grid.small:
        mats = [_f_of(f, t, lam) for t in T]
        if any(m is None for m in mats):
            continue
        try:
            M = phi.operator(w, mats)
        except ConvergenceError as exc:
            raise ConvergenceError(f"{phi.label} did not converge at lambda={lam!r}: {exc}",
                                   iterate=exc.iterate, residual=exc.residual,
                                   iterations=exc.iterations) from exc
        X = base_x if M is None else np.hstack([base_x, np.linalg.eigh(M)[1]])
        ex = float(np.max(phi.values(w, mats, X, operator=M))) - 1.0
        excesses.append(ex)
        rows.append({"lambda": lam, "max_excess": ex, "first_order": fd * top * lam})
    if not excesses:
        raise ValueError("no small grid value keeps every lam*T_i + I positive definite")
    concl = max(excesses) <= ctol
    directions = {
        "sandwich lower": lower >= -1e-10,
        "sandwich upper": upper >= -1e-10,
        "(1)=>(2)": (not hyp) or concl,
        "(2)=>(1)": (not concl) or hyp,
    }
    report = VerdictReport(
        test=f"extension [{phi.label}, f={f.name}]",
        directions=directions,
        worst_slack=float(min(lower, upper, -max(excesses))),
        grid_data=rows,
        notes=[
            f"lambda_max(sum w_i T_i) = {top!r} ({'boundary' if boundary else 'hypothesis holds' if hyp else 'hypothesis fails'})",
            f"sandwich slacks: lower {lower!r}, upper {upper!r}",
        ],
    )
    if not report.passed:
        report.witness = {"T": T, "w": w}
    return report


def random_hermitian_tuple(n: int, dim: int, w, seed, mode: str = "negative", margin: float = 0.1):
    """Symmetric tuple with ``sum_i w_i T_i`` negative semidefinite, zero, or with a positive eigenvalue.

    ``mode`` is ``"negative"`` (hypothesis holds), ``"boundary"`` (the
    weighted sum has top eigenvalue exactly 0) or ``"positive"`` (top
    eigenvalue at least ``margin``).
    """
    rng = np.random.default_rng(seed)
    w = as_weights(w, n)
    T = [random_sym(dim, rng) for _ in range(n - 1)]
    partial = sum(wk * tk for wk, tk in zip(w[:-1], T))
    if mode == "negative":
        target = -random_psd(dim, rng)
    elif mode == "boundary":
        Q = random_orthogonal(dim, rng)
        lam = -np.abs(rng.standard_normal(dim))
        lam[-1] = 0.0
        target = (Q * lam) @ Q.T
    elif mode == "positive":
        target = random_sym(dim, rng, 0.3)
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        target += (margin + max(0.0, -float(v @ target @ v)) + rng.uniform(0, 1)) * np.outer(v, v)
    else:
        raise ValueError("mode must be 'negative', 'boundary' or 'positive'")
    last = (target - partial) / w[-1]
    T.append((last + last.T) / 2)
    return T


# ---------------------------------------------------------------------------
# auxiliary inequalities used in the proofs


def verify_y2013_and_f1997(samples: int = 100, seed=0, dim: int = 3, n: int = 3,
                           tol: float = 1e-9) -> VerdictReport:
    """``prod_i <A_i x, x>^{w_i} >= <Karcher(w; A) x, x>`` for unit ``x``, and
    ``log A <= log B  =>  ||A|| <= ||B||`` with ``B = exp(log A + PSD)``."""
    rng = np.random.default_rng(seed)
    y_worst, f_worst = np.inf, np.inf
    rows = []
    for k in range(samples):
        mats = [random_spd(dim, float(np.exp(rng.uniform(0, np.log(100)))), rng) for _ in range(n)]
        w = rng.dirichlet(np.ones(n))
        L = karcher_mean(w, mats)
        x = _unit_vectors(dim, 1, rng)[:, 0]
        lhs = float(np.prod([(x @ a @ x) ** wk for a, wk in zip(mats, w)]))
        rhs = float(x @ L @ x)
        ys = (lhs - rhs) / max(1.0, lhs)

        A = random_spd(dim, float(np.exp(rng.uniform(0, np.log(100)))), rng)
        B = expm(logm(A) + random_psd(dim, rng, scale=float(rng.uniform(0.01, 1))))
        assert loewner_leq(logm(A), logm(B), 1e-10)
        nA, nB = spectral_norm(A), spectral_norm(B)
        fs = (nB - nA) / max(1.0, nB)
        y_worst, f_worst = min(y_worst, ys), min(f_worst, fs)
        rows.append({"sample": k, "y2013_slack": ys, "f1997_slack": fs})
    return VerdictReport(
        test="y2013 and f1997",
        directions={"Y2013": y_worst >= -tol, "F1997": f_worst >= -tol},
        worst_slack=float(min(y_worst, f_worst)),
        grid_data=rows,
    )


# ---------------------------------------------------------------------------
# log-Euclidean monotonicity counterexample search

_SEARCH_BATCH = 4096


def _batch_funm(A, fn):
    lam, Q = np.linalg.eigh(A)
    return np.einsum("bij,bj,bkj->bik", Q, fn(lam), Q)


def _draw_batch(rng, size, dim, commuting):
    Q = np.linalg.qr(rng.standard_normal((size, dim, dim)))[0]
    lam = np.exp(rng.uniform(0, np.log(1e3), (size, dim)))
    A = np.einsum("bij,bj,bkj->bik", Q, lam, Q)
    if commuting:
        p = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), (size, dim))) * rng.uniform(0, 1, (size, dim))
        P = np.einsum("bij,bj,bkj->bik", Q, p, Q)
        return A, A + P
    g = rng.standard_normal((size, dim))
    s = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size))
    return A, A + s[:, None, None] * np.einsum("bi,bj->bij", g, g)


def search_p4_violation_log_euclidean(trials: int = 10 ** 6, seed=42, dim: int = 2, n: int = 2,
                                      w=None, commuting: bool = False, tol: float = 1e-10) -> VerdictReport:
    """Random search for ``A_i <= B_i`` with ``G_E(w; A) not <= G_E(w; B)``.

    Each trial draws ``A_i`` with log-uniform spectrum in ``[1, 1e3]`` and a
    Haar eigenbasis, and ``B_i = A_i + s g g^T`` with ``s`` log-uniform in
    ``[1e-2, 1e2]``.  With ``commuting=True`` every ``A_i, B_i`` of a trial
    share one eigenbasis, where no violation can exist.  The first witness
    found is re-verified with the package's unbatched routines.
    """
    w = as_weights(w, n)
    test = f"p4search log-euclidean [dim={dim}, n={n}]"
    if dim == 1:
        return VerdictReport(test=test, directions={"witness found": False}, worst_slack=0.0,
                             inconclusive=True, notes=["inconclusive by construction: scalars commute"])
    rng = np.random.default_rng(seed)
    done = 0
    worst = np.inf
    while done < trials:
        size = min(_SEARCH_BATCH, trials - done)
        if commuting:
            Q = np.linalg.qr(rng.standard_normal((size, dim, dim)))[0]
            draws = []
            for _ in range(n):
                lam = np.exp(rng.uniform(0, np.log(1e3), (size, dim)))
                p = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), (size, dim))) * rng.uniform(0, 1, (size, dim))
                A = np.einsum("bij,bj,bkj->bik", Q, lam, Q)
                draws.append((A, A + np.einsum("bij,bj,bkj->bik", Q, p, Q)))
        else:
            draws = [_draw_batch(rng, size, dim, False) for _ in range(n)]
        LA = sum(wk * _batch_funm(a, np.log) for wk, (a, _) in zip(w, draws))
        LB = sum(wk * _batch_funm(b, np.log) for wk, (_, b) in zip(w, draws))
        GA = _batch_funm(LA, np.exp)
        GB = _batch_funm(LB, np.exp)
        D = GB - GA
        lmin = np.linalg.eigvalsh((D + np.swapaxes(D, 1, 2)) / 2)[:, 0]
        scale = np.maximum(1.0, np.maximum(np.linalg.norm(GA, 2, axis=(1, 2)), np.linalg.norm(GB, 2, axis=(1, 2))))
        slack = lmin / scale
        worst = min(worst, float(slack.min()))
        hits = np.nonzero(slack < -tol)[0]
        for i in hits:
            A_t = [as_spd(a[i]) for a, _ in draws]
            B_t = [as_spd(b[i]) for _, b in draws]
            if not all(loewner_leq(a, b, 0.0) for a, b in zip(A_t, B_t)):
                continue
            GA_i = log_euclidean_mean(w, A_t)
            GB_i = log_euclidean_mean(w, B_t)
            if loewner_leq(GA_i, GB_i, tol):
                continue
            return VerdictReport(
                test=test,
                directions={"witness found": True},
                worst_slack=loewner_slack(GA_i, GB_i),
                witness={"w": w, "A": A_t, "B": B_t,
                         "min_eigenvalue": float(np.linalg.eigvalsh(GB_i - GA_i)[0])},
                grid_data=[{"trials_run": int(done + i + 1)}],
            )
        done += size
    return VerdictReport(
        test=test, directions={"witness found": False}, worst_slack=float(worst), inconclusive=True,
        grid_data=[{"trials_run": int(done)}],
        notes=[f"no violation in {done} trials"],
    )
