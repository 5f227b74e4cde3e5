"""Representing functions and two-variable Kubo-Ando means.

A mean is determined by its representing function ``f`` (operator monotone on
``(0, inf)`` with ``f(1) = 1``)::

    A sigma_f B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}

User-supplied functions only get a scalar screen (normalization, derivative
at 1, monotonicity on a grid).  Operator monotonicity itself cannot be
checked numerically; the operator-level guarantees of the package hold only
when the caller supplies a genuinely operator monotone ``f``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .spd_core import as_spd, invsqrtm, matrix_map, sqrtm

FD_STEP = 1e-6
FD_TOL = 1e-6
LOG_SERIES_RADIUS = 1e-4


class InconsistentDerivativeError(ValueError):
    pass


def screening_grid(points: int = 1000, low: float = 1e-6, high: float = 1e6) -> np.ndarray:
    return np.logspace(np.log10(low), np.log10(high), points)


def central_difference_at_one(fn, h: float = FD_STEP) -> float:
    return float((fn(np.array([1.0 + h])) - fn(np.array([1.0 - h])))[0] / (2 * h))


@dataclass(frozen=True)
class ReprFunction:
    """Scalar representing function with its derivative at 1.

    ``eval`` must be vectorized over numpy arrays.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    deriv_at_one: float
    name: str = "f"
    weight: float | None = field(default=None, compare=False)

    def __post_init__(self):
        one = float(np.asarray(self.eval(np.array([1.0])))[0])
        if abs(one - 1.0) > 1e-12:
            raise ValueError(f"{self.name}: f(1) = {one!r}, expected 1")
        if not 0.0 <= self.deriv_at_one <= 1.0:
            raise ValueError(f"{self.name}: f'(1) = {self.deriv_at_one!r} is outside [0, 1]")
        fd = central_difference_at_one(self.eval)
        if abs(fd - self.deriv_at_one) > FD_TOL:
            raise InconsistentDerivativeError(
                f"{self.name}: stated f'(1) = {self.deriv_at_one!r} but finite difference gives {fd!r}"
            )
        vals = np.asarray(self.eval(screening_grid()), dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError(f"{self.name}: values must be positive and finite on (0, inf)")
        if np.any(np.diff(vals) < -1e-12 * np.maximum(1.0, np.abs(vals[1:]))):
            raise ValueError(f"{self.name}: not monotone nondecreasing on the screening grid")

    def __call__(self, t):
        return self.eval(np.asarray(t, dtype=float))

    @property
    def is_constant(self) -> bool:
        return self.deriv_at_one == 0.0


def _check_weight(w: float) -> float:
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {w!r}")
    return w


def power(w: float) -> ReprFunction:
    """``t -> t**w``, the weighted geometric mean."""
    w = _check_weight(w)
    return ReprFunction(lambda t: np.power(t, w), w, f"power:{w:g}", weight=w)


def arithmetic(w: float) -> ReprFunction:
    w = _check_weight(w)
    return ReprFunction(lambda t: (1 - w) + w * t, w, f"arithmetic:{w:g}", weight=w)


def harmonic(w: float) -> ReprFunction:
    w = _check_weight(w)
    return ReprFunction(lambda t: 1.0 / ((1 - w) + w / t), w, f"harmonic:{w:g}", weight=w)


def _logarithmic_eval(t):
    t = np.asarray(t, dtype=float)
    near = np.abs(t - 1.0) < LOG_SERIES_RADIUS
    safe = np.where(near, 2.0, t)
    far = (safe - 1.0) / np.log(safe)
    s = np.log(np.where(near, t, 1.0))
    # (e^s - 1)/s expanded around s = 0
    series = 1.0 + s * (1 / 2 + s * (1 / 6 + s * (1 / 24 + s / 120)))
    return np.where(near, series, far)


def logarithmic() -> ReprFunction:
    """``t -> (t - 1)/log t``, the logarithmic mean (weight 1/2)."""
    return ReprFunction(_logarithmic_eval, 0.5, "logarithmic", weight=0.5)


def geometric() -> ReprFunction:
    return power(0.5)


def parse_repr(spec: str) -> ReprFunction:
    """Build a built-in from a label such as ``"power:0.5"`` or ``"logarithmic"``."""
    name, _, arg = spec.strip().partition(":")
    name = name.lower()
    if name == "logarithmic":
        return logarithmic()
    if name == "geometric" and not arg:
        return geometric()
    makers = {"power": power, "geometric": power, "arithmetic": arithmetic, "harmonic": harmonic}
    if name not in makers or not arg:
        raise ValueError(
            f"unknown representing function {spec!r}; use power:w, arithmetic:w, "
            "harmonic:w, geometric or logarithmic"
        )
    return makers[name](float(arg))


BUILTIN_NAMES = ("power", "arithmetic", "harmonic", "logarithmic")


def builtins(w: float) -> list[ReprFunction]:
    """The weighted built-ins at weight ``w`` plus the logarithmic function."""
    return [power(w), arithmetic(w), harmonic(w), logarithmic()]


def binary_mean(f: ReprFunction, A, B) -> np.ndarray:
    A = as_spd(A)
    B = as_spd(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    R = sqrtm(A)
    Ri = invsqrtm(A)
    C = matrix_map(Ri @ B @ Ri, f.eval, f.name)
    out = R @ C @ R
    return as_spd(out)


def weighted_geometric(A, B, w: float) -> np.ndarray:
    """``A #_w B = A^{1/2} (A^{-1/2} B A^{-1/2})^w A^{1/2}`` for ``w`` in [0, 1]."""
    w = _check_weight(w)
    if w == 0.0:
        return as_spd(A)
    if w == 1.0:
        return as_spd(B)
    A = as_spd(A)
    B = as_spd(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    R = sqrtm(A)
    Ri = invsqrtm(A)
    C = matrix_map(Ri @ B @ Ri, lambda x: np.power(x, w), f"power {w}")
    out = R @ C @ R
    return (out + out.T) / 2


def weighted_harmonic(A, B, w: float) -> np.ndarray:
    w = _check_weight(w)
    return np.linalg.inv((1 - w) * np.linalg.inv(as_spd(A)) + w * np.linalg.inv(as_spd(B)))


def weighted_arithmetic(A, B, w: float) -> np.ndarray:
    w = _check_weight(w)
    return (1 - w) * as_spd(A) + w * as_spd(B)


def gauss_legendre_01(nodes: int):
    """Gauss-Legendre nodes and weights mapped to [0, 1] (weights sum to 1)."""
    if nodes < 1:
        raise ValueError("nodes must be >= 1")
    x, c = roots_legendre(nodes)
    return (x + 1) / 2, c / 2


def logarithmic_mean_2(A, B, nodes: int = 64) -> np.ndarray:
    """Integral of ``A #_t B`` over ``t`` in [0, 1] by Gauss-Legendre quadrature."""
    A = as_spd(A)
    B = as_spd(B)
    ts, cs = gauss_legendre_01(nodes)
    out = np.zeros_like(A)
    for t, c in zip(ts, cs):
        out += c * weighted_geometric(A, B, t)
    return as_spd(out)


def repr_derivative_at_one(f: ReprFunction) -> float:
    """Return ``f'(1)``, the weight of the mean, after re-checking it by finite differences."""
    fd = central_difference_at_one(f.eval)
    if abs(fd - f.deriv_at_one) > FD_TOL:
        raise InconsistentDerivativeError(
            f"{f.name}: stored f'(1) = {f.deriv_at_one!r} disagrees with finite difference {fd!r}"
        )
    return float(f.deriv_at_one)
