"""Riemannian submersion machinery: projections, lifts, O'Neill tensors, B.

Tensor arrays use the layout ``X[i, a, b]``: the ``i``-th component of the
tensor evaluated on coordinate vectors ``d_a`` and ``d_b``, so that
``T_X Y = einsum("iab,a,b->i", T, X, Y)``.

The vertical projector is built as a smooth field from the closed-form
vertical frame (Gram-Schmidt in the total metric), which keeps its
derivatives exact; ``h = I - v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dual
from .chart import (
    ChartPatch,
    EndoField,
    OneFormField,
    VectorField,
    as_vector_field,
    check_domain,
    eval_metric,
)
from .connection import ChristoffelAt, christoffel, codifferential, covariant
from .dual import Jet, jet_of
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    MissingStructure,
    NotSPD,
    NotVertical,
    RankDeficient,
)
from .frames import OrthoFrame, phi_adapted_frame
from .linalg import cholesky, gram_schmidt, inv_spd, jacobi_svd, solve_spd
from .structures import AlmostContactMetricStructure, AlmostHermitianStructure

__all__ = [
    "SubmersionInstance",
    "PointContext",
    "point_context",
    "jacobian",
    "v_project",
    "h_project",
    "horizontal_lift",
    "lift_jet",
    "oneill_T",
    "oneill_A",
    "tensor_B",
    "mean_curvature",
    "trace_B_h",
    "fibre_codiff",
    "base_codiff",
    "submersion_frame",
    "horizontal_basis",
    "vertical_basis",
    "fibre_patch",
    "fibre_structure",
    "tensor_apply",
    "instance_residuals",
    "base_point",
]

_RANK_TOL = 1e-10
_VERTICAL_TOL = 1e-9
_MEMO_LIMIT = 2048


@dataclass(frozen=True, eq=False)
class SubmersionInstance:
    """Chart-local Riemannian submersion ``pi: total -> base``.

    ``vertical_frame`` holds closed-form fields spanning ``Ker d pi``;
    ``structure`` and ``base_structure`` are present on contact-complex
    instances.  ``params`` records builder parameters (e.g. the warping
    function) for checks that need them.
    """

    name: str
    total: ChartPatch
    base: ChartPatch
    pi: Callable
    vertical_frame: tuple
    structure: AlmostContactMetricStructure | None = None
    base_structure: AlmostHermitianStructure | None = None
    params: dict = field(default_factory=dict)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def is_contact_complex(self) -> bool:
        return self.structure is not None and self.base_structure is not None

    @property
    def fibre_dim(self) -> int:
        return len(self.vertical_frame)


def _require_structures(sub: SubmersionInstance) -> None:
    if not sub.is_contact_complex:
        raise MissingStructure(f"{sub.name} lacks the total or base structure")


def _inv_jet(m: Jet) -> Jet:
    inv = inv_spd(m.val)
    return Jet(inv, -np.einsum("ab,bck,cd->adk", inv, m.d, inv))


def _transpose_jet(m: Jet) -> Jet:
    return Jet(m.val.T, m.d.transpose(1, 0, 2))


def _projector_field(sub: SubmersionInstance) -> Callable:
    frame = sub.vertical_frame
    metric = sub.total.metric

    def fn(x):
        g = metric(x)
        on = gram_schmidt([np.asarray(f(x)) for f in frame], g)
        U = np.array(on).T
        return U @ U.T @ g

    return fn


def _cov_array(chris: ChristoffelAt, m: Jet) -> np.ndarray:
    """C[i, a, b] = (nabla_{d_a} (M d_b))^i for a matrix field M."""
    return m.d.transpose(0, 2, 1) + np.einsum("ial,lb->iab", chris.gamma, m.val)


@dataclass(frozen=True)
class PointContext:
    """Everything pointwise the submersion operations share at one point."""

    point: np.ndarray
    metric: np.ndarray
    chris: ChristoffelAt
    dpi: np.ndarray
    P: Jet
    Ph: Jet
    phi: Jet | None
    T: np.ndarray
    A: np.ndarray
    B: np.ndarray | None


def point_context(sub: SubmersionInstance, p) -> PointContext:
    p = check_domain(sub.total, p)
    key = p.tobytes()
    if key not in sub._memo:
        if len(sub._memo) > _MEMO_LIMIT:
            sub._memo.clear()
        sub._memo[key] = _build_context(sub, p)
    return sub._memo[key]


def _build_context(sub: SubmersionInstance, p: np.ndarray) -> PointContext:
    g = eval_metric(sub.total, p)
    chris = christoffel(sub.total, p)
    dpi = jacobian(sub, p)
    n = g.shape[0]
    P = jet_of(_projector_field(sub), p)
    Ph = Jet(np.eye(n) - P.val, -P.d)
    Pv, Hv = P.val, Ph.val
    CP, CPh = _cov_array(chris, P), _cov_array(chris, Ph)
    T = np.einsum("ij,jcb,ca->iab", Hv, CP, Pv) + np.einsum("ij,jcb,ca->iab", Pv, CPh, Pv)
    A = np.einsum("ij,jcb,ca->iab", Pv, CPh, Hv) + np.einsum("ij,jcb,ca->iab", Hv, CP, Hv)
    phi = B = None
    if sub.structure is not None:
        phi = jet_of(sub.structure.phi, p)
        phiP, phiPh = phi @ P, phi @ Ph
        CphiP, CphiPh = _cov_array(chris, phiP), _cov_array(chris, phiPh)
        B = (
            np.einsum("ij,jcb,ca->iab", Pv, CphiPh, Hv)
            - np.einsum("ij,jcb,ca->iab", Pv, CPh, phiPh.val)
            + np.einsum("ij,jcb,ca->iab", Hv, CphiP, Hv)
            - np.einsum("ij,jcb,ca->iab", Hv, CP, phiPh.val)
        )
    return PointContext(p, g, chris, dpi, P, Ph, phi, T, A, B)


def tensor_apply(arr: np.ndarray, X, Y) -> np.ndarray:
    return np.einsum("iab,a,b->i", arr, np.asarray(X, float), np.asarray(Y, float))


# -- maps and projections ------------------------------------------------------


def jacobian(sub: SubmersionInstance, p) -> np.ndarray:
    """d pi at ``p`` as a (base dim) x (total dim) matrix."""
    p = check_domain(sub.total, p)
    _, grad, _ = dual.d2_eval(sub.pi, p, order=1)
    sigma, _ = jacobi_svd(grad.T)
    if sigma.size < sub.base.dim or np.sort(sigma)[-sub.base.dim] <= _RANK_TOL * max(
        float(np.max(sigma)), 1.0
    ):
        raise RankDeficient(f"d pi has rank below {sub.base.dim} at {p.tolist()}")
    return grad


def v_project(sub: SubmersionInstance, p, X) -> np.ndarray:
    return point_context(sub, p).P.val @ np.asarray(X, float)


def h_project(sub: SubmersionInstance, p, X) -> np.ndarray:
    return point_context(sub, p).Ph.val @ np.asarray(X, float)


def _lift_operator(g: np.ndarray, dpi: np.ndarray) -> np.ndarray:
    """L with d pi L = I and image horizontal: G^-1 Dpi^T (Dpi G^-1 Dpi^T)^-1."""
    ginv = inv_spd(g)
    m = dpi @ ginv @ dpi.T
    try:
        cholesky(m)
    except NotSPD as exc:
        raise RankDeficient("d pi is not surjective on the horizontal space") from exc
    return ginv @ dpi.T @ inv_spd(m)


def horizontal_lift(sub: SubmersionInstance, p, Xp) -> np.ndarray:
    """Horizontal vector at ``p`` projecting to the base vector ``Xp``."""
    ctx = point_context(sub, p)
    return _lift_operator(ctx.metric, ctx.dpi) @ np.asarray(Xp, float)


def lift_jet(sub: SubmersionInstance, p, base_field) -> Jet:
    """Jet at ``p`` of the basic field lifting a base vector field."""
    p = check_domain(sub.total, p)
    val, dpi, ddpi = dual.d2_eval(sub.pi, p, order=2)
    g, dg, _ = dual.d2_eval(sub.total.metric, p, order=1)
    G = Jet(0.5 * (g + g.T), 0.5 * (dg + dg.transpose(1, 0, 2)))
    D = Jet(dpi, ddpi)
    Ginv = _inv_jet(G)
    DT = _transpose_jet(D)
    Minv = _inv_jet(D @ Ginv @ DT)
    xb = jet_of(as_vector_field(base_field), val)
    X = Jet(xb.val, xb.d @ dpi)
    return Ginv @ DT @ Minv @ X


# -- O'Neill tensors and B -----------------------------------------------------


def _jet(p, X) -> Jet:
    return X if isinstance(X, Jet) else jet_of(as_vector_field(X), p)


def oneill_T(sub: SubmersionInstance, p, X, Y) -> np.ndarray:
    """T_X Y = h nabla_{vX} vY + v nabla_{vX} hY (fields differentiated as given)."""
    ctx = point_context(sub, p)
    Xj, Yj = _jet(ctx.point, X), _jet(ctx.point, Y)
    a = ctx.P.val @ Xj.val
    return ctx.Ph.val @ covariant(ctx.chris, ctx.P @ Yj, a) + ctx.P.val @ covariant(
        ctx.chris, ctx.Ph @ Yj, a
    )


def oneill_A(sub: SubmersionInstance, p, X, Y) -> np.ndarray:
    """A_X Y = v nabla_{hX} hY + h nabla_{hX} vY."""
    ctx = point_context(sub, p)
    Xj, Yj = _jet(ctx.point, X), _jet(ctx.point, Y)
    a = ctx.Ph.val @ Xj.val
    return ctx.P.val @ covariant(ctx.chris, ctx.Ph @ Yj, a) + ctx.Ph.val @ covariant(
        ctx.chris, ctx.P @ Yj, a
    )


def tensor_B(sub: SubmersionInstance, p, X, Y) -> np.ndarray:
    """B(X,Y) = v nabla_{hX} phi hY - v nabla_{phi hX} hY + h nabla_{hX} phi vY - h nabla_{phi hX} vY."""
    _require_structures(sub)
    ctx = point_context(sub, p)
    Xj, Yj = _jet(ctx.point, X), _jet(ctx.point, Y)
    hx = ctx.Ph.val @ Xj.val
    phx = ctx.phi.val @ hx
    hY, vY = ctx.Ph @ Yj, ctx.P @ Yj
    c = ctx.chris
    return ctx.P.val @ (covariant(c, ctx.phi @ hY, hx) - covariant(c, hY, phx)) + ctx.Ph.val @ (
        covariant(c, ctx.phi @ vY, hx) - covariant(c, vY, phx)
    )


# -- frames --------------------------------------------------------------------


def vertical_basis(sub: SubmersionInstance, p) -> list:
    p = check_domain(sub.total, p)
    return [np.asarray(f(p), float) for f in sub.vertical_frame]


def horizontal_basis(sub: SubmersionInstance, p) -> list:
    """Lifts of the base coordinate vectors."""
    ctx = point_context(sub, p)
    L = _lift_operator(ctx.metric, ctx.dpi)
    return [L[:, a].copy() for a in range(sub.base.dim)]


def submersion_frame(sub: SubmersionInstance, p) -> OrthoFrame:
    """Adapted orthonormal frame {X_i, phi X_i; V_j, phi V_j; xi} at ``p``.

    Without a contact structure the frame is a plain orthonormal
    horizontal + vertical frame.
    """
    p = check_domain(sub.total, p)
    key = ("frame", p.tobytes())
    if key not in sub._memo:
        if len(sub._memo) > _MEMO_LIMIT:
            sub._memo.clear()
        sub._memo[key] = _submersion_frame(sub, p)
    return sub._memo[key]


def _submersion_frame(sub: SubmersionInstance, p: np.ndarray) -> OrthoFrame:
    g = eval_metric(sub.total, p)
    vert, hor = vertical_basis(sub, p), horizontal_basis(sub, p)
    if len(vert) + len(hor) != sub.total.dim:
        raise DimensionMismatch(
            f"fibre dim {len(vert)} + base dim {len(hor)} != total dim {sub.total.dim}"
        )
    if sub.structure is None:
        vecs = gram_schmidt(hor, g) + gram_schmidt(vert, g)
        tags = ("X",) * len(hor) + ("V",) * len(vert)
        return OrthoFrame(p, np.array(vecs), tags)
    n2, m2 = sub.base.dim, sub.total.dim - 1
    if n2 % 2 or m2 % 2 or sub.total.dim != n2 + (m2 - n2) + 1:
        raise DimensionMismatch(
            f"dimensions ({sub.total.dim}, {sub.base.dim}) do not fit 2n + 2(m-n) + 1"
        )
    return phi_adapted_frame(sub.total, sub.structure, p, vert, hor)


# -- traces and codifferentials -------------------------------------------------


def mean_curvature(sub: SubmersionInstance, p) -> np.ndarray:
    """H = sum over a vertical orthonormal frame of h nabla_E E (no 1/dim factor)."""
    ctx = point_context(sub, p)
    E = gram_schmidt(vertical_basis(sub, ctx.point), ctx.metric)
    return sum((tensor_apply(ctx.T, e, e) for e in E), np.zeros(sub.total.dim))


def trace_B_h(sub: SubmersionInstance, p) -> np.ndarray:
    """Sum of B(E, E) over a full horizontal orthonormal frame."""
    _require_structures(sub)
    ctx = point_context(sub, p)
    frame = submersion_frame(sub, ctx.point)
    return sum((tensor_apply(ctx.B, e, e) for e in frame.horizontal), np.zeros(sub.total.dim))


def fibre_codiff(sub: SubmersionInstance, p, V) -> float:
    """Codifferential of the fibre's fundamental form on a vertical ``V``.

    Uses the Gauss formula (induced connection = v nabla) over the vertical
    part of the adapted frame.
    """
    _require_structures(sub)
    ctx = point_context(sub, p)
    V = np.asarray(V, float)
    hv = ctx.Ph.val @ V
    if np.sqrt(max(hv @ ctx.metric @ hv, 0.0)) > _VERTICAL_TOL:
        raise NotVertical("argument has a horizontal component")
    frame = submersion_frame(sub, ctx.point)
    phiP = ctx.phi @ ctx.P
    CphiP, CP = _cov_array(ctx.chris, phiP), _cov_array(ctx.chris, ctx.P)
    total = 0.0
    for e in frame.vertical:
        w = ctx.P.val @ np.einsum("iab,a,b->i", CphiP, e, e) - ctx.phi.val @ ctx.P.val @ np.einsum(
            "iab,a,b->i", CP, e, e
        )
        total += float(w @ ctx.metric @ V)
    return total


def base_codiff(sub: SubmersionInstance, pb, Xb) -> float:
    """Codifferential of the base fundamental form on a J-adapted frame."""
    if sub.base_structure is None:
        raise MissingStructure(f"{sub.name} has no base structure")
    pb = check_domain(sub.base, pb)
    frame = sub.base_structure.frame(pb)
    return codifferential(sub.base, sub.base_structure.J, pb, frame.vectors, Xb)


# -- fibre as a manifold in its own right ----------------------------------------


def _constant_vertical_frame(sub: SubmersionInstance, p) -> np.ndarray:
    cols = []
    for f in sub.vertical_frame:
        j = jet_of(f, p)
        if np.max(np.abs(j.d)) > 0.0:
            raise DegenerateInput("fibre charts need constant vertical frame fields")
        cols.append(j.val)
    return np.array(cols).T


def fibre_patch(sub: SubmersionInstance, p, radius: float = 1e-3) -> ChartPatch:
    """Affine chart s -> p + E s of the fibre through ``p`` with the induced metric."""
    p = check_domain(sub.total, p)
    E = _constant_vertical_frame(sub, p)
    metric = sub.total.metric

    def g_hat(s):
        x = p + E @ s
        return E.T @ metric(x) @ E

    k = E.shape[1]
    return ChartPatch(k, (-radius,) * k, (radius,) * k, g_hat, name=f"{sub.name}-fibre")


def fibre_structure(sub: SubmersionInstance, p, patch: ChartPatch | None = None):
    """Induced almost contact metric structure on the fibre chart of ``p``."""
    _require_structures(sub)
    p = check_domain(sub.total, p)
    E = _constant_vertical_frame(sub, p)
    patch = patch or fibre_patch(sub, p)
    st = sub.structure
    metric = sub.total.metric

    def coords(x, M):
        g = metric(x)
        return solve_spd(E.T @ g @ E, E.T @ g @ M)

    phi = EndoField(lambda s: coords(p + E @ s, st.phi(p + E @ s) @ E))
    xi = VectorField(lambda s: coords(p + E @ s, st.xi(p + E @ s)))
    eta = OneFormField(lambda s: st.eta(p + E @ s) @ E)
    return AlmostContactMetricStructure(patch, phi, xi, eta, name=f"{st.name}-fibre")


def instance_residuals(sub: SubmersionInstance, p) -> dict:
    """Residuals of the defining properties at ``p``.

    ``vertical``: max |d pi V| over the vertical frame; ``riemannian``:
    max |g'(d pi H_a, d pi H_b) - delta_ab| on an orthonormal horizontal
    basis; ``holomorphic``: max |J d pi e - d pi phi e| over an orthonormal
    frame (0 when a structure is absent).
    """
    ctx = point_context(sub, p)
    dpi = ctx.dpi
    out = {"vertical": 0.0, "riemannian": 0.0, "holomorphic": 0.0}
    for v in vertical_basis(sub, ctx.point):
        out["vertical"] = max(out["vertical"], float(np.max(np.abs(dpi @ v))))
    pb = base_point(sub, ctx.point)
    gb = eval_metric(sub.base, pb)
    H = np.array(gram_schmidt(horizontal_basis(sub, ctx.point), ctx.metric))
    gram = (H @ dpi.T) @ gb @ (dpi @ H.T)
    out["riemannian"] = float(np.max(np.abs(gram - np.eye(len(H)))))
    if sub.is_contact_complex:
        J = sub.base_structure.endo_at(pb)
        E = gram_schmidt(list(np.eye(sub.total.dim)), ctx.metric)
        diff = J @ dpi - dpi @ ctx.phi.val
        out["holomorphic"] = max(
            float(np.sqrt(max((diff @ e) @ gb @ (diff @ e), 0.0))) for e in E
        )
    return out


def base_point(sub: SubmersionInstance, p) -> np.ndarray:
    """pi(p), checked against the base chart."""
    p = check_domain(sub.total, p)
    pb = np.asarray(dual.d2_eval(sub.pi, p, order=1)[0], float)
    return check_domain(sub.base, pb)
