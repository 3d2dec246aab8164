"""Dense symmetric eigenvalue kernel behind every certificate verdict.

All matrices in scope are tiny (state dimensions up to roughly ten), so
the extremal eigenvalues are computed with a cyclic Jacobi iteration:
simple, provably convergent, and easy to audit.  numpy is used only for
array arithmetic, not for the eigenvalue decision itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NonSquare, NotSymmetric

DEFAULT_TOL = 1e-9

_MAX_SWEEPS = 60


@dataclass(frozen=True)
class EigenExtremes:
    lambda_min: float
    lambda_max: float


@dataclass(frozen=True)
class NsdVerdict:
    """Negative-semidefiniteness verdict.

    ``lambda_max`` is the largest eigenvalue found; when the check fails
    it is the offending one.
    """

    holds: bool
    lambda_max: float


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array or raise."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise NonSquare(f"{name}: expected a 2-D array, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise NonFinite(f"{name}: non-finite entries")
    return m


def _square_symmetric(m, tol: float, name: str) -> np.ndarray:
    m = as_matrix(m, name)
    rows, cols = m.shape
    if rows != cols:
        raise NonSquare(f"{name}: expected square, got {rows}x{cols}")
    if rows == 0:
        raise NonSquare(f"{name}: empty matrix")
    asym = float(np.max(np.abs(m - m.T))) if rows > 1 else 0.0
    if asym > tol:
        raise NotSymmetric(f"{name}: asymmetry {asym:.3e} exceeds tol {tol:.3e}")
    return 0.5 * (m + m.T)


def _jacobi_eigenvalues(a: np.ndarray, tol: float) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Stops once the off-diagonal Frobenius norm falls below
    tol * max(1, ||a||_F); that norm also bounds the eigenvalue error.
    """
    a = a.copy()
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy()
    scale = max(1.0, float(np.sqrt(np.sum(a * a))))
    stop = max(tol, 1e-15) * scale
    # A rotation is skipped when the pivot is already below this; a full
    # sweep of skips implies the off-diagonal norm is under ``stop``.
    pivot_floor = stop / (2.0 * n)
    for _ in range(_MAX_SWEEPS):
        off = float(np.sqrt(2.0 * np.sum(np.tril(a, -1) ** 2)))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= pivot_floor:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    else:
        raise RuntimeError("Jacobi iteration failed to converge")
    return np.sort(np.diag(a))


def eig_extremes(m, tol: float = DEFAULT_TOL) -> EigenExtremes:
    """Smallest and largest eigenvalue of a symmetric matrix.

    The input must be symmetric up to ``tol`` in max-abs norm; it is
    symmetrized before iterating, and the results are accurate to about
    ``tol`` relative to the matrix scale.
    """
    sym = _square_symmetric(m, tol, "matrix")
    vals = _jacobi_eigenvalues(sym, tol)
    return EigenExtremes(lambda_min=float(vals[0]), lambda_max=float(vals[-1]))


def nsd_check(m, tol: float = DEFAULT_TOL) -> NsdVerdict:
    """Check m <= 0 in the semidefinite order, up to ``tol``."""
    ext = eig_extremes(m, tol)
    return NsdVerdict(holds=ext.lambda_max <= tol, lambda_max=ext.lambda_max)


def spectral_norm(m, tol: float = DEFAULT_TOL) -> float:
    """Largest singular value, via the Gram matrix of the smaller side."""
    m = as_matrix(m, "matrix")
    if m.size == 0:
        return 0.0
    gram = m @ m.T if m.shape[0] <= m.shape[1] else m.T @ m
    gram = 0.5 * (gram + gram.T)
    vals = _jacobi_eigenvalues(gram, tol)
    return float(np.sqrt(max(float(vals[-1]), 0.0)))
