"""Almost contact metric and almost Hermitian structures.

Residual checks here evaluate tensors on orthonormal adapted frames, so the
reported numbers do not depend on how the chart scales coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chart import (
    ChartPatch,
    EndoField,
    OneFormField,
    TwoFormField,
    VectorField,
    as_vector_field,
    check_domain,
    eval_metric,
)
from .connection import (
    bracket_jets,
    christoffel,
    codifferential,
    ext_deriv_1form,
    ext_deriv_1form_components,
    ext_deriv_2form_components,
    nabla_endo,
)
from .dual import Jet, jet_of
from .frames import OrthoFrame, complement_basis, phi_adapted_frame
from .linalg import gram_schmidt

__all__ = [
    "AlmostContactMetricStructure",
    "AlmostHermitianStructure",
    "structure_frame",
    "fundamental_form",
    "fundamental_form_field",
    "classify",
    "a_star",
    "a_star_matrix",
    "check_a_star_identities",
    "n_tensors",
    "nijenhuis",
    "harmonicity_residual",
]


@dataclass(frozen=True, eq=False)
class AlmostContactMetricStructure:
    patch: ChartPatch
    phi: EndoField
    xi: VectorField
    eta: OneFormField
    name: str = "structure"
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def endo_field(self) -> EndoField:
        return self.phi

    def endo_at(self, p) -> np.ndarray:
        return np.asarray(self.phi(np.asarray(p, float)), dtype=float)

    def xi_at(self, p) -> np.ndarray:
        return np.asarray(self.xi(np.asarray(p, float)), dtype=float)

    def eta_at(self, p) -> np.ndarray:
        return np.asarray(self.eta(np.asarray(p, float)), dtype=float)

    def nabla_phi(self, p) -> np.ndarray:
        """D[i, j, k] = ((nabla_{d_k} phi) d_j)^i, cached per point."""
        p = check_domain(self.patch, p)
        key = ("nabla_phi", p.tobytes())
        if key not in self._memo:
            if len(self._memo) > 2048:
                self._memo.clear()
            self._memo[key] = nabla_endo(self.patch, self.phi, p)
        return self._memo[key]

    def axiom_residuals(self, p) -> dict:
        """Residuals of phi^2 = -I + eta (x) xi, eta(xi) = 1, metric compatibility
        and the derived identities, on an orthonormal basis."""
        p = check_domain(self.patch, p)
        g = eval_metric(self.patch, p)
        phi, xi, eta = self.endo_at(p), self.xi_at(p), self.eta_at(p)
        n = g.shape[0]
        E = np.array(gram_schmidt(list(np.eye(n)), g)).T  # g-orthonormal columns
        Einv = E.T @ g
        sq = Einv @ (phi @ phi + np.eye(n) - np.outer(xi, eta)) @ E
        compat = E.T @ (phi.T @ g @ phi - g + np.outer(eta, eta)) @ E
        return {
            "phi_squared": float(np.max(np.abs(sq))),
            "eta_xi": abs(float(eta @ xi) - 1.0),
            "metric_compatibility": float(np.max(np.abs(compat))),
            "phi_xi": float(np.sqrt(abs((phi @ xi) @ g @ (phi @ xi)))),
            "eta_phi": float(np.max(np.abs((eta @ phi) @ E))),
            "eta_is_g_xi": float(np.max(np.abs((eta - g @ xi) @ E))),
        }


@dataclass(frozen=True, eq=False)
class AlmostHermitianStructure:
    patch: ChartPatch
    J: EndoField
    name: str = "hermitian"

    @property
    def endo_field(self) -> EndoField:
        return self.J

    def endo_at(self, p) -> np.ndarray:
        return np.asarray(self.J(np.asarray(p, float)), dtype=float)

    def axiom_residuals(self, p) -> dict:
        g = eval_metric(self.patch, p)
        J = self.endo_at(p)
        n = g.shape[0]
        return {
            "J_squared": float(np.max(np.abs(J @ J + np.eye(n)))),
            "metric_compatibility": float(np.max(np.abs(J.T @ g @ J - g))),
        }

    def frame(self, p) -> OrthoFrame:
        p = check_domain(self.patch, p)
        g = eval_metric(self.patch, p)
        return phi_adapted_frame(self.patch, self, p, [], list(np.eye(g.shape[0])))


def structure_frame(structure: AlmostContactMetricStructure, p) -> OrthoFrame:
    """Adapted frame {e_i, phi e_i; xi} built from the coordinate basis."""
    p = check_domain(structure.patch, p)
    g = eval_metric(structure.patch, p)
    xi = structure.xi_at(p)
    return phi_adapted_frame(structure.patch, structure, p, [xi], complement_basis(g, [xi]))


def fundamental_form(structure, p, X, Y) -> float:
    """Phi(X, Y) = g(X, phi Y)."""
    g = eval_metric(structure.patch, p)
    return float(np.asarray(X, float) @ g @ structure.endo_at(p) @ np.asarray(Y, float))


def fundamental_form_field(structure) -> TwoFormField:
    patch, endo = structure.patch, structure.endo_field
    return TwoFormField(lambda x: patch.metric(x) @ endo(x))


def classify(structure: AlmostContactMetricStructure, points) -> dict:
    """Max residuals of the Sasakian, cosymplectic and almost cosymplectic conditions."""
    Phi = fundamental_form_field(structure)
    sas = cos = acos = 0.0
    for p in points:
        p = check_domain(structure.patch, p)
        g = eval_metric(structure.patch, p)
        xi, eta = structure.xi_at(p), structure.eta_at(p)
        E = structure_frame(structure, p).vectors
        D = structure.nabla_phi(p)
        deta = E @ ext_deriv_1form_components(structure.eta, p) @ E.T
        dphi = np.einsum("ijk,ai,bj,ck->abc", ext_deriv_2form_components(Phi, p), E, E, E)
        acos = max(acos, float(np.max(np.abs(deta))), float(np.max(np.abs(dphi))))
        for a in E:
            for b in E:
                nab = np.einsum("ijk,k,j->i", D, a, b)
                cos = max(cos, _norm(g, nab))
                sas = max(sas, _norm(g, nab - (a @ g @ b) * xi + (eta @ b) * a))
    return {
        "sasakian_residual": sas,
        "cosymplectic_residual": cos,
        "almost_cosymplectic_residual": acos,
    }


def _norm(g, v) -> float:
    return float(np.sqrt(max(v @ g @ v, 0.0)))


def a_star_matrix(structure: AlmostContactMetricStructure, p) -> np.ndarray:
    """Matrix of A* X = -nabla_X xi."""
    p = check_domain(structure.patch, p)
    c = christoffel(structure.patch, p)
    xi = jet_of(structure.xi, p)
    return -(xi.d + np.einsum("ikl,l->ik", c.gamma, xi.val))


def a_star(structure: AlmostContactMetricStructure, p, X) -> np.ndarray:
    return a_star_matrix(structure, p) @ np.asarray(X, float)


def check_a_star_identities(structure: AlmostContactMetricStructure, points) -> dict:
    """Max residuals of A* symmetry, A* phi + phi A* = 0 (with A* xi = 0,
    eta o A* = 0), and (nabla_X phi) Y = -g(phi A* X, Y) xi + eta(Y) phi A* X."""
    e1 = e2 = e3 = 0.0
    for p in points:
        p = check_domain(structure.patch, p)
        g = eval_metric(structure.patch, p)
        phi, xi, eta = structure.endo_at(p), structure.xi_at(p), structure.eta_at(p)
        A = a_star_matrix(structure, p)
        D = structure.nabla_phi(p)
        E = structure_frame(structure, p).vectors
        anti = A @ phi + phi @ A
        e2 = max(e2, _norm(g, A @ xi))
        for a in E:
            e2 = max(e2, _norm(g, anti @ a), abs(eta @ A @ a))
            for b in E:
                e1 = max(e1, abs((A @ a) @ g @ b - a @ g @ (A @ b)))
                lhs = np.einsum("ijk,k,j->i", D, a, b)
                pa = phi @ A @ a
                rhs = -(pa @ g @ b) * xi + (eta @ b) * pa
                e3 = max(e3, _norm(g, lhs - rhs))
    return {"e1": e1, "e2": e2, "e3": e3}


def nijenhuis(endo: Jet, X: Jet, Y: Jet) -> np.ndarray:
    """[phi, phi](X, Y) = phi^2 [X,Y] + [phi X, phi Y] - phi [phi X, Y] - phi [X, phi Y]."""
    phi = endo.val
    pX, pY = endo @ X, endo @ Y
    return (
        phi @ phi @ bracket_jets(X, Y)
        + bracket_jets(pX, pY)
        - phi @ bracket_jets(pX, Y)
        - phi @ bracket_jets(X, pY)
    )


def _pair_jet(form: Jet, vec: Jet) -> Jet:
    """Scalar jet of form(vec)."""
    return Jet(
        np.asarray(form.val @ vec.val),
        np.einsum("ik,i->k", form.d, vec.val) + np.einsum("i,ik->k", form.val, vec.d),
    )


def _lie_eta(eta: Jet, Z: Jet, W: Jet) -> float:
    """(L_Z eta)(W) = Z(eta(W)) - eta([Z, W])."""
    return float(_pair_jet(eta, W).d @ Z.val - eta.val @ bracket_jets(Z, W))


def n_tensors(structure: AlmostContactMetricStructure, p, X, Y) -> dict:
    """The normality tensors N1(X,Y), N2(X,Y), N3(X), N4(X).

    X and Y are fields (arrays are taken as constant-component fields); N2-N4
    involve Lie derivatives and depend on the extension.  d eta enters N1
    with the half-normalized convention so that N1 = [phi,phi] + 2 d eta xi
    vanishes on normal structures.
    """
    p = check_domain(structure.patch, p)
    phi = jet_of(structure.phi, p)
    xi = jet_of(structure.xi, p)
    eta = jet_of(structure.eta, p)
    Xj = jet_of(as_vector_field(X), p)
    Yj = jet_of(as_vector_field(Y), p)
    deta_half = 0.5 * ext_deriv_1form(structure.eta, p, Xj.val, Yj.val)
    n1 = nijenhuis(phi, Xj, Yj) + 2.0 * deta_half * xi.val
    n2 = _lie_eta(eta, phi @ Xj, Yj) - _lie_eta(eta, phi @ Yj, Xj)
    n3 = bracket_jets(xi, phi @ Xj) - phi.val @ bracket_jets(xi, Xj)
    n4 = _lie_eta(eta, xi, Xj)
    return {"N1": n1, "N2": n2, "N3": n3, "N4": n4}


def harmonicity_residual(structure: AlmostContactMetricStructure, points) -> dict:
    """Max |d Phi| over frame triples and max |delta Phi| over frame vectors."""
    Phi = fundamental_form_field(structure)
    dmax = cmax = 0.0
    for p in points:
        p = check_domain(structure.patch, p)
        frame = structure_frame(structure, p)
        D = structure.nabla_phi(p)
        E = frame.vectors
        dphi = np.einsum("ijk,ai,bj,ck->abc", ext_deriv_2form_components(Phi, p), E, E, E)
        dmax = max(dmax, float(np.max(np.abs(dphi))))
        for a in E:
            cmax = max(cmax, abs(codifferential(structure.patch, structure.phi, p, E, a, D)))
    return {"dPhi_max": dmax, "deltaPhi_max": cmax}
