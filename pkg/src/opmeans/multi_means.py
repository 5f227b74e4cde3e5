"""Multivariable means of n-tuples of SPD matrices.

Weighted arithmetic, harmonic and log-Euclidean means are closed forms.  The
ALM and BMP geometric means are computed by their symmetrization recursions,
the power means ``P_t`` by fixed-point iteration of ``X = sum_k w_k X #_t A_k``
and the Karcher mean by a gradient iteration started at the log-Euclidean
mean.  :func:`check_property` turns each of the axioms P1-P10 of
multivariable geometric means into an executable predicate.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .kubo_ando import weighted_geometric
from .report import VerdictReport
from .spd_core import (
    _geodesic,
    _max_spread,
    _sqrt_pair,
    _sym,
    _thompson_from,
    as_spd,
    commutator_norm,
    expm,
    inv,
    invsqrtm,
    logm,
    loewner_leq,
    loewner_slack,
    matrix_map,
    random_orthogonal,
    random_psd,
    random_spd,
    spectral_norm,
    sqrtm,
    thompson_distance,
)

MAX_RECURSIVE_N = 6
KARCHER_MAX_HALVINGS = 30


class ConvergenceError(RuntimeError):
    """An iterative mean did not reach its tolerance.

    Carries the last iterate, the residual there, and the iteration count.
    """

    def __init__(self, message, iterate=None, residual=None, iterations=None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 10_000
    karcher_step: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.karcher_step <= 1:
            raise ValueError("karcher_step must lie in (0, 1]")


@dataclass(frozen=True)
class SolveInfo:
    iterations: int
    residual: float


KIND_TAGS = ("alm", "bmp", "power", "karcher", "log-euclidean", "arithmetic", "harmonic")


@dataclass(frozen=True)
class MeanKind:
    """Selector for a multivariable mean plus its solver settings."""

    tag: str
    t: float | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.tag not in KIND_TAGS:
            raise ValueError(f"unknown mean kind {self.tag!r}; expected one of {KIND_TAGS}")
        if self.tag == "power":
            if self.t is None or not -1 <= self.t <= 1 or self.t == 0:
                raise ValueError(f"power mean exponent must lie in [-1, 1] without 0, got {self.t!r}")
        elif self.t is not None:
            raise ValueError(f"{self.tag} takes no exponent")

    @property
    def label(self) -> str:
        return f"power:{self.t:g}" if self.tag == "power" else self.tag

    @property
    def uniform_only(self) -> bool:
        return self.tag == "alm"

    def with_solver(self, solver: SolverConfig) -> "MeanKind":
        return replace(self, solver=solver)

    @classmethod
    def parse(cls, text: str, solver: SolverConfig | None = None) -> "MeanKind":
        """Parse labels like ``"karcher"``, ``"power:0.5"`` or ``"log_euclidean"``."""
        tag, _, arg = text.strip().lower().replace("_", "-").partition(":")
        if tag in ("logeuclidean", "log-euclid"):
            tag = "log-euclidean"
        t = float(arg) if arg else None
        return cls(tag, t, solver or SolverConfig())

    def __call__(self, w, A, return_info=False):
        return evaluate(self, w, A, return_info=return_info)


def as_weights(w, n: int) -> np.ndarray:
    """Validate a probability vector of length ``n``; ``None`` means uniform."""
    if w is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(w, dtype=float).ravel()
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weights must be positive and finite")
    total = w.sum()
    if abs(total - 1) > 1e-8:
        raise ValueError(f"weights must sum to 1, got {float(total)!r}")
    return w / total


def _as_tuple(A) -> list[np.ndarray]:
    mats = [as_spd(a) for a in A]
    if not mats:
        raise ValueError("need at least one matrix")
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"matrices have different shapes {sorted(shapes)}")
    return mats


def _weights_and_tuple(w, A):
    mats = _as_tuple(A)
    return as_weights(w, len(mats)), mats


def _is_uniform(w) -> bool:
    return bool(np.allclose(w, 1.0 / len(w), rtol=0, atol=1e-12))


def arithmetic_mean(w, A) -> np.ndarray:
    w, A = _weights_and_tuple(w, A)
    out = np.zeros_like(A[0])
    for wk, Ak in zip(w, A):
        out += wk * Ak
    return out


def harmonic_mean(w, A) -> np.ndarray:
    w, A = _weights_and_tuple(w, A)
    return inv(arithmetic_mean(w, [inv(a) for a in A]))


def log_euclidean_mean(w, A) -> np.ndarray:
    w, A = _weights_and_tuple(w, A)
    L = np.zeros_like(A[0])
    for wk, Ak in zip(w, A):
        L += wk * logm(Ak)
    return expm(L)


def _spread(mats) -> float:
    return _max_spread(mats)


def _inner_config(cfg: SolverConfig) -> SolverConfig:
    # inner means feed the outer spread; keep their error well below the outer tolerance
    return replace(cfg, tol=max(cfg.tol / 8, 1e-15))


def _check_recursive_n(n, name):
    if n < 2:
        raise ValueError(f"{name} mean needs at least 2 matrices")
    if n > MAX_RECURSIVE_N:
        raise ValueError(f"{name} mean is limited to n <= {MAX_RECURSIVE_N} (cost grows factorially)")


def _alm(A, cfg):
    if len(A) == 2:
        return _geodesic(A[0], A[1], 0.5)
    return alm_mean(A, cfg)


def alm_mean(A, cfg: SolverConfig | None = None, return_info=False):
    """Ando-Li-Mathias geometric mean (uniform weights only).

    Stops when the largest pairwise Thompson distance within the iterated
    tuple is at most ``cfg.tol`` and returns its first member.
    """
    cfg = cfg or SolverConfig()
    A = _as_tuple(A)
    n = len(A)
    _check_recursive_n(n, "ALM")
    if n == 2:
        X = weighted_geometric(A[0], A[1], 0.5)
        return (X, SolveInfo(0, 0.0)) if return_info else X
    inner = _inner_config(cfg)
    cur = A
    spread = _spread(cur)
    for it in range(cfg.max_iter + 1):
        if spread <= cfg.tol:
            return (cur[0], SolveInfo(it, spread)) if return_info else cur[0]
        if it == cfg.max_iter:
            break
        cur = [_alm(cur[:i] + cur[i + 1:], inner) for i in range(n)]
        spread = _spread(cur)
    raise ConvergenceError(
        f"ALM recursion (n={n}) did not converge in {cfg.max_iter} iterations; spread {spread:.3e}",
        iterate=cur[0], residual=spread, iterations=cfg.max_iter,
    )


def bmp_mean(w, A, cfg: SolverConfig | None = None, return_info=False):
    """Weighted BMP geometric mean by its recursion over (n-1)-means."""
    cfg = cfg or SolverConfig()
    w, A = _weights_and_tuple(w, A)
    n = len(A)
    _check_recursive_n(n, "BMP")
    if n == 2:
        X = weighted_geometric(A[0], A[1], w[1])
        return (X, SolveInfo(0, 0.0)) if return_info else X
    inner = _inner_config(cfg)
    cur = A
    spread = _spread(cur)
    for it in range(cfg.max_iter + 1):
        if spread <= cfg.tol:
            return (cur[0], SolveInfo(it, spread)) if return_info else cur[0]
        if it == cfg.max_iter:
            break
        nxt = []
        for i in range(n):
            rest = [j for j in range(n) if j != i]
            w_rest = w[rest] / w[rest].sum()
            others = [cur[j] for j in rest]
            G = _geodesic(others[0], others[1], w_rest[1]) if n == 3 else bmp_mean(w_rest, others, inner)
            nxt.append(_geodesic(G, cur[i], w[i]))
        cur = nxt
        spread = _spread(cur)
    raise ConvergenceError(
        f"BMP recursion (n={n}) did not converge in {cfg.max_iter} iterations; spread {spread:.3e}",
        iterate=cur[0], residual=spread, iterations=cfg.max_iter,
    )


def _power_positive(t, w, A, cfg):
    X = arithmetic_mean(w, A)
    res = np.inf
    for it in range(1, cfg.max_iter + 1):
        if t == 1.0:
            Y = arithmetic_mean(w, A)
        else:
            R, Ri = _sqrt_pair(X)
            S = np.zeros_like(X)
            for wk, Ak in zip(w, A):
                mu, V = np.linalg.eigh(_sym(Ri @ Ak @ Ri))
                S += wk * ((V * mu ** t) @ V.T)
            Y = _sym(R @ S @ R)
        res = _thompson_from(_sqrt_pair(X)[1] if t == 1.0 else Ri, Y)
        X = Y
        if res <= cfg.tol:
            return X, SolveInfo(it, res)
    raise ConvergenceError(
        f"power mean (t={t:g}) did not converge in {cfg.max_iter} iterations; residual {res:.3e}",
        iterate=X, residual=res, iterations=cfg.max_iter,
    )


def power_mean(t: float, w, A, cfg: SolverConfig | None = None, return_info=False):
    """Power mean ``P_t`` for ``t`` in [-1, 1] without 0.

    For ``t > 0`` the fixed point of ``X -> sum_k w_k X #_t A_k`` started at
    the arithmetic mean; for ``t < 0`` the dual ``P_{-t}(w; A^{-1})^{-1}``.
    """
    cfg = cfg or SolverConfig()
    t = float(t)
    if not -1 <= t <= 1 or t == 0:
        raise ValueError(f"power mean exponent must lie in [-1, 1] without 0, got {t!r}")
    w, A = _weights_and_tuple(w, A)
    if t == 1:
        X, info = arithmetic_mean(w, A), SolveInfo(1, 0.0)
    elif t > 0:
        X, info = _power_positive(t, w, A, cfg)
    else:
        Y, info = _power_positive(-t, w, [inv(a) for a in A], cfg)
        X = inv(Y)
    return (X, info) if return_info else X


def karcher_gradient(w, A, X) -> np.ndarray:
    """``sum_i w_i log(X^{-1/2} A_i X^{-1/2})``; zero exactly at the Karcher mean."""
    Ri = invsqrtm(X)
    G = np.zeros_like(X)
    for wk, Ak in zip(w, A):
        G += wk * logm(Ri @ Ak @ Ri)
    return G


def karcher_mean(w, A, cfg: SolverConfig | None = None, return_info=False):
    """Weighted Karcher mean by gradient iteration from the log-Euclidean mean.

    ``X <- X^{1/2} exp(step * grad) X^{1/2}``; the step is halved (up to 30
    times) until the gradient norm shrinks by at least a factor
    ``1 - step/2``.  The objective has Hessian >= I on the SPD cone, so small
    steps pass away from the rounding floor; plain decrease is not enough,
    since step 1 can settle into a slowly decaying two-cycle on
    ill-conditioned inputs.  When no step meets the factor (at the floor),
    the trial with the smallest gradient norm below the current one is taken.
    """
    cfg = cfg or SolverConfig()
    w, A = _weights_and_tuple(w, A)
    X = log_euclidean_mean(w, A)
    G = karcher_gradient(w, A, X)
    res = spectral_norm(G)
    for it in range(1, cfg.max_iter + 1):
        if res <= cfg.tol:
            return (X, SolveInfo(it, res)) if return_info else X
        if it == cfg.max_iter:
            break
        R = sqrtm(X)
        step = cfg.karcher_step
        best = None
        for _ in range(KARCHER_MAX_HALVINGS + 1):
            Xn = R @ expm(step * G) @ R
            Xn = (Xn + Xn.T) / 2
            Gn = karcher_gradient(w, A, Xn)
            res_n = spectral_norm(Gn)
            if res_n <= (1 - step / 2) * res:
                best = (Xn, Gn, res_n)
                break
            if res_n < res and (best is None or res_n < best[2]):
                best = (Xn, Gn, res_n)
            step /= 2
        if best is None:
            raise ConvergenceError(
                f"Karcher iteration stalled at residual {res:.3e} after {it} iterations",
                iterate=X, residual=res, iterations=it,
            )
        X, G, res = best
    raise ConvergenceError(
        f"Karcher iteration did not converge in {cfg.max_iter} iterations; residual {res:.3e}",
        iterate=X, residual=res, iterations=cfg.max_iter,
    )


def evaluate(kind: MeanKind, w, A, return_info=False):
    """Evaluate the mean selected by ``kind``."""
    cfg = kind.solver
    if kind.tag == "alm":
        n = len(A)
        if w is not None and not _is_uniform(as_weights(w, n)):
            raise ValueError("the ALM mean is defined for uniform weights only")
        return alm_mean(A, cfg, return_info)
    if kind.tag == "bmp":
        return bmp_mean(w, A, cfg, return_info)
    if kind.tag == "power":
        return power_mean(kind.t, w, A, cfg, return_info)
    if kind.tag == "karcher":
        return karcher_mean(w, A, cfg, return_info)
    closed = {"log-euclidean": log_euclidean_mean, "arithmetic": arithmetic_mean, "harmonic": harmonic_mean}
    X = closed[kind.tag](w, A)
    return (X, SolveInfo(0, 0.0)) if return_info else X


# ---------------------------------------------------------------------------
# P1-P10 as executable predicates

PROPERTIES = tuple(f"P{k}" for k in range(1, 11))

PROPERTY_NAMES = {
    "P1": "commuting product",
    "P2": "positive-scalar homogeneity",
    "P3": "permutation invariance",
    "P4": "monotonicity",
    "P5": "Thompson-Lipschitz continuity",
    "P6": "joint concavity",
    "P7": "congruence invariance",
    "P8": "self-duality",
    "P9": "determinant identity",
    "P10": "harmonic-arithmetic bracketing",
}


def random_invertible(dim: int, rng, spread: float = 2.0) -> np.ndarray:
    U = random_orthogonal(dim, rng)
    V = random_orthogonal(dim, rng)
    s = np.exp(rng.uniform(-np.log(spread), np.log(spread), size=dim))
    return (U * s) @ V


def _mats(A):
    return [np.asarray(a).tolist() for a in A]


def check_property(prop: str, kind: MeanKind, w, A, *, B=None, X=None, perm=None,
                   scalars=None, t=None, seed=0, tol: float = 1e-9, value=None) -> VerdictReport:
    """Check one of P1..P10 for ``kind`` at ``(w, A)``.

    Auxiliary inputs that are not supplied are drawn from ``seed``: a
    componentwise larger tuple ``B = A + PSD`` (P4), a random SPD tuple
    (P5, P6), a random invertible ``X`` (P7), a random permutation (P3) and
    random positive scalars (P2).  Equalities are measured by Thompson
    distance, orders by :func:`~opmeans.spd_core.loewner_slack`; the property
    passes when the worst slack is at least ``-tol``.  ``value`` may carry a
    precomputed mean of ``(w, A)`` to save one evaluation.
    """
    prop = prop.upper()
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    A = _as_tuple(A)
    n, d = len(A), A[0].shape[0]
    w = as_weights(w, n)
    rng = np.random.default_rng(seed)
    base = {}

    def G(ww, AA):
        if AA is A and ww is w:
            if "X" not in base:
                base["X"] = as_spd(value) if value is not None else evaluate(kind, w, A)
            return base["X"]
        return evaluate(kind, ww, AA)

    witness = {"w": w, "A": _mats(A)}
    data = {}

    if prop == "P1":
        # commuting tuple: the inputs themselves if they commute, otherwise
        # their spectra (shuffled) placed in the eigenbasis of A[0]
        Q = np.linalg.eigh(A[0])[1]
        if all(commutator_norm(A[0], a) <= 1e-12 * max(1.0, spectral_norm(a)) ** 2 for a in A[1:]):
            lams = [np.einsum("ij,ij->j", Q, a @ Q) for a in A]
        else:
            lams = [np.linalg.eigvalsh(A[0])] + [rng.permutation(np.linalg.eigvalsh(a)) for a in A[1:]]
        C = [(Q * lam) @ Q.T for lam in lams]
        expected = (Q * np.prod([lam ** wk for lam, wk in zip(lams, w)], axis=0)) @ Q.T
        slack = -thompson_distance(G(w, C), expected)
        witness["commuting"] = _mats(C)
    elif prop == "P2":
        a = np.exp(rng.uniform(np.log(0.1), np.log(10), size=n)) if scalars is None else np.asarray(scalars, float)
        lhs = G(w, [ak * Ak for ak, Ak in zip(a, A)])
        rhs = float(np.prod(a ** w)) * G(w, A)
        slack = -thompson_distance(lhs, rhs)
        witness["scalars"] = a
    elif prop == "P3":
        p = rng.permutation(n) if perm is None else np.asarray(perm)
        if sorted(p.tolist()) != list(range(n)):
            raise ValueError(f"{perm!r} is not a permutation of range({n})")
        slack = -thompson_distance(G(w[p], [A[i] for i in p]), G(w, A))
        witness["perm"] = p
    elif prop == "P4":
        if B is None:
            B = [Ak + random_psd(d, rng, scale=float(rng.uniform(0.1, 2))) for Ak in A]
        B = _as_tuple(B)
        if not all(loewner_leq(a, b, 0.0) for a, b in zip(A, B)):
            raise ValueError("P4 needs A_i <= B_i for every i")
        slack = loewner_slack(G(w, A), G(w, B))
        witness["B"] = _mats(B)
    elif prop == "P5":
        if B is None:
            B = [random_spd(d, 10.0, rng) * float(rng.uniform(0.5, 2)) for _ in range(n)]
        B = _as_tuple(B)
        bound = float(sum(wk * thompson_distance(a, b) for wk, a, b in zip(w, A, B)))
        dist = thompson_distance(G(w, A), G(w, B))
        slack = (bound - dist) / max(1.0, bound)
        data = {"distance": dist, "bound": bound}
        witness["B"] = _mats(B)
    elif prop == "P6":
        if B is None:
            B = [random_spd(d, 10.0, rng) * float(rng.uniform(0.5, 2)) for _ in range(n)]
        B = _as_tuple(B)
        s = float(rng.uniform(0.1, 0.9)) if t is None else float(t)
        lhs = (1 - s) * G(w, A) + s * G(w, B)
        rhs = G(w, [(1 - s) * a + s * b for a, b in zip(A, B)])
        slack = loewner_slack(lhs, rhs)
        witness["B"] = _mats(B)
        witness["t"] = s
    elif prop == "P7":
        Xm = random_invertible(d, rng) if X is None else np.asarray(X, float)
        lhs = G(w, [Xm.T @ a @ Xm for a in A])
        rhs = Xm.T @ G(w, A) @ Xm
        slack = -thompson_distance(lhs, rhs)
        witness["X"] = Xm
    elif prop == "P8":
        slack = -thompson_distance(inv(G(w, [inv(a) for a in A])), G(w, A))
    elif prop == "P9":
        logdet = np.linalg.slogdet(G(w, A))[1]
        expected = float(sum(wk * np.linalg.slogdet(a)[1] for wk, a in zip(w, A)))
        slack = -abs(logdet - expected) / max(1.0, abs(expected))
        data = {"logdet": logdet, "expected": expected}
    else:
        M = G(w, A)
        lower = loewner_slack(harmonic_mean(w, A), M)
        upper = loewner_slack(M, arithmetic_mean(w, A))
        slack = min(lower, upper)
        data = {"lower_slack": lower, "upper_slack": upper}

    passed = slack >= -tol
    report = VerdictReport(
        test=f"{prop} {PROPERTY_NAMES[prop]} [{kind.label}]",
        directions={prop: bool(passed)},
        worst_slack=float(slack),
        witness=None if passed else witness,
        grid_data=[{"n": n, "dim": d, **data}] if data else [{"n": n, "dim": d}],
    )
    return report
