"""Dense symmetric eigendecompositions and the symmetric-definite pencil solver.

Everything downstream (PCA/DCA/MDR/JUPA fits) funnels through the three
routines here. Matrices are plain float64 numpy arrays in row-major order.
The generalized problem A w = lambda B w is reduced to a standard symmetric
problem through the Cholesky factor of B and mapped back, which keeps the
returned eigenvectors B-orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    KTooLargeError,
    NoConvergenceError,
    NotPositiveDefiniteError,
    NotSquareError,
    NotSymmetricError,
)

#: relative tolerance used when deciding an input is symmetric
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class EigenResult:
    """Spectrum sorted in non-increasing order; column j pairs with eigenvalue j."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquareError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotSymmetricError(f"{name} contains non-finite entries")
    return a


def _check_symmetric(a: np.ndarray, name: str) -> np.ndarray:
    scale = 1.0 + np.linalg.norm(a, "fro")
    if np.linalg.norm(a - a.T, "fro") > SYMMETRY_RTOL * scale:
        raise NotSymmetricError(f"{name} is not symmetric within {SYMMETRY_RTOL} relative tolerance")
    # absorb floating-point asymmetry from scatter accumulation
    return (a + a.T) / 2.0


def _fix_signs(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (deterministic output)."""
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def symmetric_eig(a) -> EigenResult:
    """Full spectrum of a symmetric matrix, eigenvalues descending.

    Raises NotSquareError / NotSymmetricError on bad input and
    NoConvergenceError if the underlying QR iteration fails.
    """
    a = _check_symmetric(_as_square(a, "a"), "a")
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"eigendecomposition did not converge: {exc}") from exc
    order = np.arange(w.size - 1, -1, -1)
    return EigenResult(eigenvalues=w[order], eigenvectors=_fix_signs(v[:, order]))


def cholesky(b) -> np.ndarray:
    """Lower-triangular L with L @ L.T == b for symmetric positive definite b."""
    b = _check_symmetric(_as_square(b, "b"), "b")
    try:
        return np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "matrix is not positive definite (non-positive pivot); "
            "increase the rho_0 regularizer"
        ) from exc


def generalized_eig(a, b, k: int) -> EigenResult:
    """Top-k principal pairs of the symmetric-definite pencil (a, b).

    Solves a w = lambda b w by reducing on the Cholesky factor of b:
    the standard problem is solved on inv(L) a inv(L).T and eigenvectors are
    mapped back through inv(L).T, which makes them B-orthonormal.
    """
    a = _check_symmetric(_as_square(a, "a"), "a")
    b = _as_square(b, "b")
    if a.shape != b.shape:
        raise NotSquareError(f"pencil matrices differ in size: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if not 1 <= k <= n:
        raise KTooLargeError(f"k={k} outside [1, {n}]")
    ell = cholesky(b)
    # C = inv(L) A inv(L).T, kept symmetric explicitly
    y = solve_triangular(ell, a, lower=True)
    c = solve_triangular(ell, y.T, lower=True).T
    c = (c + c.T) / 2.0
    try:
        w, v = np.linalg.eigh(c)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"pencil eigendecomposition did not converge: {exc}") from exc
    order = np.arange(w.size - 1, -1, -1)[:k]
    vectors = solve_triangular(ell.T, v[:, order], lower=False)
    return EigenResult(eigenvalues=w[order], eigenvectors=_fix_signs(vectors))


def orthonormal_basis(w) -> np.ndarray:
    """Orthonormal basis of the column span of w (thin QR with positive diagonal)."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    q, r = np.linalg.qr(w)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def principal_angles(w1, w2) -> np.ndarray:
    """Principal angles (radians, ascending) between the column spans of w1 and w2."""
    q1 = orthonormal_basis(w1)
    q2 = orthonormal_basis(w2)
    sv = np.linalg.svd(q1.T @ q2, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


def max_principal_angle(w1, w2) -> float:
    """Largest principal angle between two subspaces (0 when they coincide)."""
    return float(np.max(principal_angles(w1, w2)))
