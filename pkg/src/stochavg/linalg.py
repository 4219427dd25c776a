"""Small dense linear-algebra kernels used by the rest of the package.

Everything here operates on plain float64 ndarrays.  The eigensolver is a
cyclic Jacobi iteration: the matrices that show up (Laplacians and their
symmetrized sums) are small and symmetric, and Jacobi keeps the dependency
surface down to numpy array ops while converging to machine precision in a
handful of sweeps.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonFinite, NotSymmetric

#: Default numerical tolerance for symmetry checks and convergence tests.
DEFAULT_TOL = 1e-10

#: Hard cap on Jacobi sweeps; small symmetric matrices converge in far fewer.
_MAX_SWEEPS = 100


def as_matrix(m, *, name: str = "matrix") -> np.ndarray:
    """Coerce input to a finite 2-D float64 array.

    Raises NonFinite if any entry is NaN or infinite, DimensionMismatch if
    the input is not two-dimensional.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains non-finite entries")
    return a


def as_vector(v, *, name: str = "vector") -> np.ndarray:
    """Coerce input to a finite 1-D float64 array."""
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains non-finite entries")
    return a


def _offdiag_mass(a: np.ndarray) -> float:
    # Frobenius mass of the strictly off-diagonal part.
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def sym_eigenvalues(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Symmetric matrix.  Asymmetry beyond ``tol`` relative to the largest
        entry raises NotSymmetric.
    tol : float
        Convergence and symmetry tolerance.

    Returns
    -------
    ndarray, shape (n,)
        Eigenvalues sorted ascending, each accurate to within a small
        multiple of ``tol`` times the spectral radius.

    Notes
    -----
    Cyclic Jacobi: sweeps over all (p, q) pairs applying Givens rotations,
    stopping when the off-diagonal Frobenius mass falls below ``tol`` times
    its initial value (capped at 100 sweeps).  Convergence is quadratic, so
    the cap is never reached for sane inputs.
    """
    a = as_matrix(m)
    n, nc = a.shape
    if n != nc:
        raise DimensionMismatch(f"matrix must be square, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(a - a.T))) > tol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    if n == 1:
        return a[:, 0].copy()

    # Work on an exactly symmetric copy so rotations stay consistent.
    a = 0.5 * (a + a.T)
    initial = _offdiag_mass(a)
    if initial == 0.0:
        return np.sort(np.diag(a))
    threshold = tol * initial

    for _ in range(_MAX_SWEEPS):
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Classic Jacobi rotation choosing the smaller angle.
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    # tau*tau would overflow; use the asymptotic angle.
                    t = 0.5 / tau
                elif tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                # Pin the annihilated pair to kill rounding residue.
                a[p, q] = 0.0
                a[q, p] = 0.0
        if _offdiag_mass(a) <= threshold:
            break

    return np.sort(np.diag(a))


def spectral_norm(m, tol: float = DEFAULT_TOL) -> float:
    """Largest singular value of a matrix.

    Computed as the square root of the top eigenvalue of ``m.T @ m``, which
    is symmetric positive semidefinite, so the Jacobi solver applies.  Tiny
    negative eigenvalues from roundoff are clamped to zero.
    """
    a = as_matrix(m)
    gram = a.T @ a
    eigs = sym_eigenvalues(gram, tol=tol)
    top = float(eigs[-1])
    return float(np.sqrt(top)) if top > 0.0 else 0.0


def frobenius_norm(m) -> float:
    """Frobenius norm (entrywise 2-norm) of a matrix."""
    a = as_matrix(m)
    return float(np.sqrt(np.sum(a * a)))
