"""Small dense linear algebra that works on float and D2Scalar arrays alike.

Everything here is written against plain Python arithmetic so that AD
scalars flow through factorizations and solves.
"""

from __future__ import annotations

import numpy as np

from . import dual
from .errors import DegenerateInput, NotSPD

__all__ = [
    "cholesky",
    "cholesky_solve",
    "solve_spd",
    "inv_spd",
    "gram_schmidt",
    "jacobi_svd",
    "nullspace",
]


def _dtype(*arrays):
    return object if any(np.asarray(a).dtype == object for a in arrays) else float


def cholesky(a) -> np.ndarray:
    """Lower-triangular L with L L^T = a.  Raises NotSPD on a non-positive pivot."""
    a = np.asarray(a)
    n = a.shape[0]
    L = np.zeros((n, n), dtype=_dtype(a))
    for j in range(n):
        s = a[j, j]
        for k in range(j):
            s = s - L[j, k] * L[j, k]
        if not dual.value_of(s) > 0.0:
            raise NotSPD(f"non-positive pivot {dual.value_of(s):.3e} at index {j}")
        L[j, j] = dual.sqrt(s)
        for i in range(j + 1, n):
            t = a[i, j]
            for k in range(j):
                t = t - L[i, k] * L[j, k]
            L[i, j] = t / L[j, j]
    return L


def cholesky_solve(L, b) -> np.ndarray:
    """Solve (L L^T) x = b; ``b`` may be a vector or a matrix of columns."""
    L = np.asarray(L)
    b = np.asarray(b)
    n = L.shape[0]
    dt = _dtype(L, b)
    y = np.zeros(b.shape, dtype=dt)
    for i in range(n):
        s = b[i]
        for k in range(i):
            s = s - L[i, k] * y[k]
        y[i] = s / L[i, i]
    x = np.zeros(b.shape, dtype=dt)
    for i in reversed(range(n)):
        s = y[i]
        for k in range(i + 1, n):
            s = s - L[k, i] * x[k]
        x[i] = s / L[i, i]
    return x


def solve_spd(a, b) -> np.ndarray:
    return cholesky_solve(cholesky(a), b)


def inv_spd(a) -> np.ndarray:
    a = np.asarray(a)
    return solve_spd(a, np.eye(a.shape[0]))


def gram_schmidt(vectors, metric, pivot_tol: float = 1e-12) -> list:
    """Metric-orthonormalize ``vectors`` in order (two passes per vector).

    Raises DegenerateInput if a vector is dependent on its predecessors.
    """
    metric = np.asarray(metric)
    out: list = []
    for v in vectors:
        w = np.asarray(v)
        for _ in range(2):
            for e in out:
                w = w - (e @ metric @ w) * e
        nrm2 = w @ metric @ w
        if not dual.value_of(nrm2) > pivot_tol**2:
            raise DegenerateInput(
                f"Gram-Schmidt pivot {np.sqrt(max(dual.value_of(nrm2), 0.0)):.3e} below {pivot_tol:g}"
            )
        out.append(w / dual.sqrt(nrm2))
    return out


def jacobi_svd(a, sweeps: int = 60, eps: float = 1e-15):
    """One-sided Jacobi SVD of a float matrix.

    Returns ``(sigma, V)`` with ``a @ V`` having mutually orthogonal columns of
    norms ``sigma`` (unsorted, one per column of ``a``).
    """
    U = np.array(a, dtype=float, copy=True)
    n = U.shape[1]
    V = np.eye(n)
    for _ in range(sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = U[:, i] @ U[:, i]
                beta = U[:, j] @ U[:, j]
                gamma = U[:, i] @ U[:, j]
                scale = np.sqrt(alpha) * np.sqrt(beta)  # no underflow for tiny columns
                if gamma == 0.0 or scale == 0.0 or abs(gamma) <= eps * scale:
                    continue
                off = max(off, abs(gamma) / scale)
                zeta = (beta - alpha) / (2.0 * gamma)
                if not np.isfinite(zeta):
                    continue
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                ui, uj = U[:, i].copy(), U[:, j].copy()
                U[:, i] = c * ui - s * uj
                U[:, j] = s * ui + c * uj
                vi, vj = V[:, i].copy(), V[:, j].copy()
                V[:, i] = c * vi - s * vj
                V[:, j] = s * vi + c * vj
        if off <= eps:
            break
    sigma = np.sqrt(np.einsum("ij,ij->j", U, U))
    return sigma, V


def nullspace(a, tol: float = 1e-10) -> np.ndarray:
    """Euclidean-orthonormal kernel basis of ``a`` as rows (possibly empty)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    sigma, V = jacobi_svd(a)
    scale = max(float(np.max(sigma)) if sigma.size else 0.0, 1.0)
    keep = sigma <= tol * scale
    return V[:, keep].T.copy()
