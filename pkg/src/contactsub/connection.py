"""Levi-Civita connection, curvature, exterior derivative and codifferential.

Conventions used throughout the package:

* ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`` and
  ``R(X,Y,Z,W) = g(R(X,Y)Z, W)``, so a round unit sphere has
  ``R(X,Y,Y,X) = +1`` on orthonormal X, Y.
* ``d eta(X,Y) = X eta(Y) - Y eta(X) - eta([X,Y])`` (no factor 1/2), and the
  analogous unnormalized cyclic formula for 2-forms.
* ``delta Phi(X) = -sum_a (nabla_{e_a} Phi)(e_a, X)`` over an orthonormal frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import ChartPatch, as_vector_field, check_domain, d2_eval
from .dual import Jet, jet_of
from .errors import FrameMismatch
from .linalg import cholesky, inv_spd

__all__ = [
    "ChristoffelAt",
    "christoffel",
    "covariant",
    "cov_deriv_vec",
    "lie_bracket",
    "bracket_jets",
    "riemann_tensor",
    "riemann4",
    "ext_deriv_1form",
    "ext_deriv_1form_components",
    "ext_deriv_2form",
    "ext_deriv_2form_components",
    "nabla_endo",
    "cov_deriv_phi",
    "nabla_fundamental_form",
    "codifferential",
    "codiff_2form",
]


@dataclass(frozen=True)
class ChristoffelAt:
    """Connection coefficients at a point; ``gamma[k, i, j]`` is Gamma^k_ij."""

    point: np.ndarray
    gamma: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    dmetric: np.ndarray  # dmetric[i, j, k] = d_k g_ij
    dgamma: np.ndarray  # dgamma[k, i, j, m] = d_m Gamma^k_ij

    def metric_compatibility_residual(self) -> float:
        """max |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|."""
        lower = np.einsum("lki,lj->ijk", self.gamma, self.metric)
        res = self.dmetric - lower - lower.transpose(1, 0, 2)
        return float(np.max(np.abs(res)))


def christoffel(patch: ChartPatch, p) -> ChristoffelAt:
    p = check_domain(patch, p)
    return patch.memo(("christoffel", p.tobytes()), lambda: _christoffel(patch, p))


def _christoffel(patch: ChartPatch, p: np.ndarray) -> ChristoffelAt:
    g, dg, ddg = d2_eval(patch.metric, p, order=2)
    g = 0.5 * (g + g.T)
    dg = 0.5 * (dg + dg.transpose(1, 0, 2))
    ddg = 0.5 * (ddg + ddg.transpose(1, 0, 2, 3))
    cholesky(g)
    ginv = inv_spd(g)
    ginv = 0.5 * (ginv + ginv.T)
    # s[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    s = np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    ds = (
        np.einsum("jlim->lijm", ddg)
        + np.einsum("iljm->lijm", ddg)
        - np.einsum("ijlm->lijm", ddg)
    )
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, s)
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    dgamma = 0.5 * (
        np.einsum("klm,lij->kijm", dginv, s) + np.einsum("kl,lijm->kijm", ginv, ds)
    )
    return ChristoffelAt(p, gamma, g, ginv, dg, dgamma)


def covariant(chris: ChristoffelAt, jet: Jet, a) -> np.ndarray:
    """nabla_a W for a vector field W known through its jet at the point."""
    a = np.asarray(a, dtype=float)
    return jet.d @ a + np.einsum("ikl,k,l->i", chris.gamma, a, jet.val)


def cov_deriv_vec(patch: ChartPatch, X, Y, p) -> np.ndarray:
    """nabla_X Y; X is taken pointwise, Y as a field (arrays mean constant components)."""
    p = check_domain(patch, p)
    chris = christoffel(patch, p)
    return covariant(chris, jet_of(as_vector_field(Y), p), X)


def bracket_jets(X: Jet, Y: Jet) -> np.ndarray:
    return Y.d @ X.val - X.d @ Y.val


def lie_bracket(X, Y, p) -> np.ndarray:
    """[X, Y] at p from coordinate derivatives of both fields."""
    p = np.asarray(p, dtype=float)
    return bracket_jets(jet_of(as_vector_field(X), p), jet_of(as_vector_field(Y), p))


def riemann_tensor(patch: ChartPatch, p) -> np.ndarray:
    """Components R[i, j, k, l] = R(d_i, d_j, d_k, d_l)."""
    p = check_domain(patch, p)
    return patch.memo(("riemann", p.tobytes()), lambda: _riemann(christoffel(patch, p)))


def _riemann(c: ChristoffelAt) -> np.ndarray:
    G, dG = c.gamma, c.dgamma
    # up[l, k, i, j] = R^l_kij
    up = (
        np.einsum("ljki->lkij", dG)
        - np.einsum("likj->lkij", dG)
        + np.einsum("lim,mjk->lkij", G, G)
        - np.einsum("ljm,mik->lkij", G, G)
    )
    return np.einsum("wl,lkij->ijkw", c.metric, up)


def riemann4(patch: ChartPatch, p, X, Y, Z, W) -> float:
    R = riemann_tensor(patch, p)
    return float(np.einsum("ijkl,i,j,k,l->", R, X, Y, Z, W))


def ext_deriv_1form_components(eta, p) -> np.ndarray:
    """(d eta)_ik = d_i eta_k - d_k eta_i."""
    j = jet_of(eta, np.asarray(p, dtype=float))
    return j.d.T - j.d


def ext_deriv_1form(eta, p, X, Y) -> float:
    """d eta(X, Y) = X eta(Y) - Y eta(X) - eta([X, Y])."""
    return float(np.asarray(X, float) @ ext_deriv_1form_components(eta, p) @ np.asarray(Y, float))


def ext_deriv_2form_components(Phi, p) -> np.ndarray:
    """(d Phi)_ijk = d_i Phi_jk + d_j Phi_ki + d_k Phi_ij."""
    j = jet_of(Phi, np.asarray(p, dtype=float))
    a = np.einsum("jki->ijk", j.d)  # a[i, j, k] = d_i Phi_jk
    return a + a.transpose(2, 0, 1) + a.transpose(1, 2, 0)


def ext_deriv_2form(Phi, p, X, Y, Z) -> float:
    """Cyclic sum X Phi(Y,Z) + Y Phi(Z,X) + Z Phi(X,Y) on constant extensions."""
    dphi = ext_deriv_2form_components(Phi, p)
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    return float(np.einsum("ijk,i,j,k->", dphi, X, Y, Z))


def nabla_endo(patch: ChartPatch, endo, p) -> np.ndarray:
    """D[i, j, k] = ((nabla_{d_k} phi) d_j)^i for an endomorphism field phi."""
    p = check_domain(patch, p)
    c = christoffel(patch, p)
    j = jet_of(endo, p)
    return (
        j.d
        + np.einsum("ikl,lj->ijk", c.gamma, j.val)
        - np.einsum("il,lkj->ijk", j.val, c.gamma)
    )


def cov_deriv_phi(patch: ChartPatch, structure, p, X, Y) -> np.ndarray:
    """(nabla_X phi) Y = nabla_X (phi Y) - phi (nabla_X Y), Y extended as a field."""
    p = check_domain(patch, p)
    c = christoffel(patch, p)
    phi = jet_of(structure.endo_field, p)
    y = jet_of(as_vector_field(Y), p)
    return covariant(c, phi @ y, X) - phi.val @ covariant(c, y, X)


def nabla_fundamental_form(patch: ChartPatch, endo, p, X, Y, Z, D=None) -> float:
    """(nabla_X Phi)(Y, Z) = -g((nabla_X phi) Y, Z)."""
    if D is None:
        D = nabla_endo(patch, endo, p)
    g = christoffel(patch, p).metric
    return float(-np.einsum("ijk,k,j,il,l->", D, X, Y, g, Z))


def codifferential(patch: ChartPatch, endo, p, frame_vectors, X, D=None) -> float:
    """-sum_a (nabla_{e_a} Phi)(e_a, X) over the supplied orthonormal vectors."""
    p = check_domain(patch, p)
    if D is None:
        D = nabla_endo(patch, endo, p)
    X = np.asarray(X, dtype=float)
    return -sum(nabla_fundamental_form(patch, endo, p, e, e, X, D) for e in frame_vectors)


def codiff_2form(patch: ChartPatch, structure, p, frame, X) -> float:
    """delta Phi(X) as the adapted-frame sum over horizontal pairs, vertical pairs and xi."""
    p = check_domain(patch, p)
    if frame.base_point.shape != p.shape or not np.allclose(frame.base_point, p, atol=1e-14, rtol=0):
        raise FrameMismatch("frame base point differs from evaluation point")
    return codifferential(patch, structure.endo_field, p, frame.vectors, X)
