"""Dense symmetric-matrix primitives.

Every matrix function in the package goes through a full symmetric
eigendecomposition, ``phi(A) = Q diag(phi(lambda)) Q^T``.  Matrices are plain
``numpy.ndarray`` objects; :func:`as_spd` and :func:`as_sym` validate and
symmetrize them at the package boundary.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

DEFAULT_TOL = 1e-10


class NotPositiveDefiniteError(ValueError):
    pass


class DomainError(ValueError):
    """A scalar function is undefined at some eigenvalue."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class EigenSolverError(np.linalg.LinAlgError):
    pass


class EigDecomp(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_sym(A) -> np.ndarray:
    """Return ``A`` as a float array symmetrized by averaging with its transpose."""
    A = np.array(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return (A + A.T) / 2


def as_spd(A) -> np.ndarray:
    """Symmetrize ``A`` and check that its smallest eigenvalue is positive.

    Raises
    ------
    NotPositiveDefiniteError
        If the smallest eigenvalue is not strictly positive.
    """
    A = as_sym(A)
    lam_min = np.linalg.eigvalsh(A)[0]
    if not lam_min > 0:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (smallest eigenvalue {lam_min!r})"
        )
    return A


def sym_eig(A) -> EigDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues in nondecreasing order."""
    A = as_sym(A)
    try:
        lam, Q = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(
            f"symmetric eigensolver did not converge on a {A.shape[0]}x{A.shape[0]} "
            f"matrix with norm {np.linalg.norm(A)!r}: {exc}"
        ) from exc
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(Q))):
        raise EigenSolverError("symmetric eigensolver returned non-finite values")
    return EigDecomp(lam, Q)


def matrix_map(A, phi: Callable[[np.ndarray], np.ndarray], name: str | None = None) -> np.ndarray:
    """Apply the scalar function ``phi`` to a symmetric matrix spectrally.

    ``phi`` receives the vector of eigenvalues and must return an array of the
    same shape.  Non-finite values in the image are reported as a
    :class:`DomainError` naming the offending eigenvalue.
    """
    lam, Q = sym_eig(A)
    with np.errstate(all="ignore"):
        vals = np.asarray(phi(lam), dtype=float)
    if vals.shape != lam.shape:
        vals = np.broadcast_to(vals, lam.shape).astype(float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        ev = float(lam[np.argmax(bad)])
        label = name or getattr(phi, "__name__", "function")
        raise DomainError(f"{label} is undefined at eigenvalue {ev!r}", eigenvalue=ev)
    out = (Q * vals) @ Q.T
    return (out + out.T) / 2


def sqrtm(A) -> np.ndarray:
    return matrix_map(A, _checked(np.sqrt, lambda x: x >= 0), "sqrt")


def invsqrtm(A) -> np.ndarray:
    return matrix_map(A, _checked(lambda x: 1 / np.sqrt(x), lambda x: x > 0), "inverse sqrt")


def logm(A) -> np.ndarray:
    return matrix_map(A, _checked(np.log, lambda x: x > 0), "log")


def expm(A) -> np.ndarray:
    return matrix_map(A, np.exp, "exp")


def powm(A, p: float) -> np.ndarray:
    """Real power ``A**p`` of a positive definite matrix."""
    p = float(p)
    if p == 0:
        return np.eye(np.shape(A)[0])
    if p == 1:
        return as_sym(A)
    return matrix_map(A, _checked(lambda x: np.power(x, p), lambda x: x > 0), f"power {p}")


def inv(A) -> np.ndarray:
    return matrix_map(A, _checked(lambda x: 1 / x, lambda x: x != 0), "inverse")


def _checked(fn, domain):
    def wrapped(x):
        return np.where(domain(x), fn(np.where(domain(x), x, 1.0)), np.nan)

    return wrapped


def spectral_norm(A) -> float:
    return float(np.linalg.norm(A, 2))


def loewner_slack(A, B) -> float:
    """Smallest eigenvalue of ``B - A`` divided by ``max(1, ||A||, ||B||)``.

    Nonnegative exactly when ``A <= B`` in the Loewner order.
    """
    A = as_sym(A)
    B = as_sym(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    scale = max(1.0, spectral_norm(A), spectral_norm(B))
    return float(np.linalg.eigvalsh(B - A)[0]) / scale


def loewner_leq(A, B, tol: float = DEFAULT_TOL) -> bool:
    """Test ``A <= B``: ``lambda_min(B - A) >= -tol * max(1, ||A||, ||B||)``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return loewner_slack(A, B) >= -tol


def thompson_distance(A, B) -> float:
    """Thompson metric ``max |log lambda|`` over the spectrum of ``A^{-1/2} B A^{-1/2}``."""
    A = as_spd(A)
    B = as_spd(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    R = invsqrtm(A)
    lam = np.linalg.eigvalsh(R @ B @ R)
    return float(np.max(np.abs(np.log(lam))))


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-corrected)."""
    Z = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_spd(dim: int, cond: float = 10.0, seed=None) -> np.ndarray:
    """Random SPD matrix with condition number exactly ``cond``.

    The spectrum is log-uniform on ``[1, cond]`` with both endpoints pinned,
    conjugated by a Haar orthogonal matrix.  ``seed`` is anything accepted by
    :func:`numpy.random.default_rng`, including a ``Generator``.
    """
    dim = int(dim)
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    if not cond >= 1:
        raise ValueError("cond must be >= 1")
    rng = np.random.default_rng(seed)
    Q = random_orthogonal(dim, rng)
    logs = rng.uniform(0.0, np.log(cond), size=dim)
    if dim > 1:
        logs[0], logs[-1] = 0.0, np.log(cond)
    else:
        logs[0] = 0.0
    lam = np.exp(logs)
    if cond == 1:
        return np.eye(dim)
    out = (Q * lam) @ Q.T
    return (out + out.T) / 2


def random_spd_tuple(dim: int, n: int, cond: float = 10.0, seed=None) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [random_spd(dim, cond, rng) for _ in range(n)]


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    """Random positive semidefinite matrix ``G G^T`` with ``G`` of shape (dim, rank)."""
    rank = dim if rank is None else rank
    G = rng.standard_normal((dim, rank)) * np.sqrt(scale / max(rank, 1))
    P = G @ G.T
    return (P + P.T) / 2


def random_sym(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    Z = rng.standard_normal((dim, dim)) * scale
    return (Z + Z.T) / 2


def commutator_norm(A, B) -> float:
    return spectral_norm(A @ B - B @ A)


# Unchecked kernels for inner loops.  Inputs must already be validated SPD.

def _sqrt_pair(A):
    lam, Q = np.linalg.eigh(A)
    s = np.sqrt(lam)
    return (Q * s) @ Q.T, (Q / s) @ Q.T


def _sym(A):
    return (A + A.T) / 2


def _geodesic(A, B, w):
    """``A #_w B`` without validation."""
    if w == 0.0:
        return A
    if w == 1.0:
        return B
    R, Ri = _sqrt_pair(A)
    mu, V = np.linalg.eigh(_sym(Ri @ B @ Ri))
    return _sym(R @ ((V * mu ** w) @ V.T) @ R)


def _thompson_from(Ri, B):
    lam = np.linalg.eigvalsh(_sym(Ri @ B @ Ri))
    return float(np.max(np.abs(np.log(lam))))


def _max_spread(mats):
    """Largest pairwise Thompson distance within a list of SPD matrices."""
    roots = [_sqrt_pair(a)[1] for a in mats[:-1]]
    return max(
        (_thompson_from(roots[i], mats[j]) for i in range(len(mats) - 1) for j in range(i + 1, len(mats))),
        default=0.0,
    )
