"""Closed-form reference values computed without the package's AD engine."""

from __future__ import annotations

import numpy as np


def hopf_embedding(p) -> np.ndarray:
    t, a, b = p
    return np.array([np.cos(t) * np.cos(a), np.cos(t) * np.sin(a), np.sin(t) * np.cos(b), np.sin(t) * np.sin(b)])


def hopf_embedding_jacobian(p) -> np.ndarray:
    t, a, b = p
    c, s = np.cos(t), np.sin(t)
    return np.array([
        [-s * np.cos(a), -c * np.sin(a), 0.0],
        [-s * np.sin(a), c * np.cos(a), 0.0],
        [c * np.cos(b), 0.0, -s * np.sin(b)],
        [c * np.sin(b), 0.0, s * np.cos(b)],
    ])


def hopf_metric_pullback(p) -> np.ndarray:
    """Round metric in Hopf coordinates as the pullback of the Euclidean R^4 metric."""
    Jm = hopf_embedding_jacobian(p)
    return Jm.T @ Jm


def constant_curvature_R(g: np.ndarray, K: float) -> np.ndarray:
    """R(X,Y,Z,W) = K (g(Y,Z) g(X,W) - g(X,Z) g(Y,W)), so R(X,Y,Y,X) = K on orthonormal X, Y."""
    return K * (np.einsum("jk,il->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))


def warped_gauss_curvature(f: float, df: float, ddf: float) -> float:
    """Gauss curvature of dx^2 + f(x) dy^2."""
    return -ddf / (2.0 * f) + df * df / (4.0 * f * f)


def fd_christoffel(metric, p, h: float = 1e-5) -> np.ndarray:
    """Gamma^k_ij from central differences of a float metric function."""
    p = np.asarray(p, float)
    n = p.size
    dg = np.empty((n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        dg[:, :, k] = (np.asarray(metric(p + e), float) - np.asarray(metric(p - e), float)) / (2 * h)
    ginv = np.linalg.inv(np.asarray(metric(p), float))
    s = np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    return 0.5 * np.einsum("kl,lij->kij", ginv, s)


def gram_schmidt_np(vectors, g) -> list:
    out = []
    for v in vectors:
        w = np.array(v, float)
        for e in out:
            w = w - (e @ g @ w) * e
        out.append(w / np.sqrt(w @ g @ w))
    return out


def hopf_frame(p):
    """Hopf orthonormal frame {X1, phi X1, xi} in closed form."""
    t = p[0]
    c, s = np.cos(t), np.sin(t)
    X1 = np.array([1.0, 0.0, 0.0])
    phiX1 = np.array([0.0, s / c, -c / s])
    xi = np.array([0.0, 1.0, 1.0])
    return X1, phiX1, xi
