"""Executable residual checks for the identities of contact-complex submersions.

Every check evaluates a residual at each sample point (maximized over a
family of test vectors) and aggregates max and mean into an
:class:`IdentityCheck`.  Checks never raise on a failing identity; the
residual is the result.

Curvature conventions are those of :mod:`contactsub.connection`
(``R(X,Y,Y,X) = +1`` on the unit sphere).  In this convention the
submersion curvature equations read

* vertical:   ``R(U,V,F,W) = R^(U,V,F,W) - g(T_U W, T_V F) + g(T_V W, T_U F)``
* horizontal: ``R(X,Y,Z,H) = R*(X,Y,Z,H) + 2 g(A_X Y, A_Z H) - g(A_Y Z, A_X H) + g(A_X Z, A_Y H)``

i.e. the T and A terms carry the opposite sign to the form they take when
``R`` is defined with the opposite overall sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dual
from .chart import ChartPatch, VectorField, as_vector_field, check_domain, eval_metric
from .connection import (
    bracket_jets,
    christoffel,
    codifferential,
    codiff_2form,
    covariant,
    ext_deriv_1form_components,
    nabla_endo,
    riemann_tensor,
)
from .dual import jet_of
from .errors import MissingStructure, PreconditionNotMet
from .frames import complement_basis, phi_adapted_frame
from .linalg import gram_schmidt, nullspace
from .structures import (
    AlmostContactMetricStructure,
    AlmostHermitianStructure,
    check_a_star_identities,
    classify,
    fundamental_form_field,
    harmonicity_residual,
    n_tensors,
    nijenhuis,
    structure_frame,
)
from .submersion import (
    SubmersionInstance,
    base_codiff,
    base_point,
    fibre_codiff,
    fibre_patch,
    fibre_structure,
    instance_residuals,
    lift_jet,
    mean_curvature,
    point_context,
    submersion_frame,
    tensor_apply,
    trace_B_h,
)

__all__ = [
    "IdentityCheck",
    "structure_equation_check",
    "codif3_check",
    "codif4_check",
    "gray_check",
    "gray_residual",
    "curvature_submersion_check",
    "horizontal_integrability_check",
    "kahler_base_criterion_check",
    "warped_T_check",
    "totally_umbilical_check",
    "oneill_symmetry_check",
    "basic_connection_check",
    "pullback_omega_check",
    "b_vertical_zero_check",
    "b_symmetry_check",
    "b_j_invariance_check",
    "b_formula_check",
    "b_inner_product_check",
    "b_phi_xi_check",
    "b_value_type_check",
    "fibre_codiff_intrinsic_check",
    "k1_transfer_check",
    "integrability_transfer_check",
    "k2_transfer_check",
    "k3_transfer_check",
    "almost_cosymplectic_check",
    "a_star_check",
    "n2_n4_check",
    "n3_cosymplectic_check",
    "harmonicity_check",
    "sasakian_check",
    "sasakian_codiff_check",
    "structure_axioms_check",
    "fundamental_form_check",
    "submersion_residuals_check",
    "ad_vs_fd_check",
    "torsion_free_check",
    "metric_compatibility_check",
    "riemann_symmetries_check",
    "codiff_frame_independence_check",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-7


@dataclass(frozen=True)
class IdentityCheck:
    """Aggregated residual of one identity; ``passed`` iff ``residual_max <= tolerance``."""

    name: str
    residual_max: float
    residual_mean: float
    points_used: int
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)
    notes: tuple = ()

    def __post_init__(self):
        if self.passed != (self.residual_max <= self.tolerance):
            raise ValueError("passed must equal residual_max <= tolerance")


def _result(name, per_point, tol, details=None, notes=()) -> IdentityCheck:
    r = np.asarray(per_point, dtype=float)
    rmax = float(np.max(r)) if r.size else 0.0
    rmean = float(np.mean(r)) if r.size else 0.0
    return IdentityCheck(
        name, rmax, rmean, int(r.size), float(tol), bool(rmax <= tol),
        dict(details or {}), tuple(notes),
    )


def _norm(g, v) -> float:
    return float(np.sqrt(max(float(v @ g @ v), 0.0)))


def _contact_complex(sub: SubmersionInstance) -> None:
    if not sub.is_contact_complex:
        raise MissingStructure(f"{sub.name} is not a contact-complex instance")


def _max(values, default=0.0) -> float:
    values = list(values)
    return float(max(values)) if values else default


def _base_frame_fields(sub: SubmersionInstance) -> list:
    """Orthonormal base fields obtained by Gram-Schmidt of the coordinate fields."""
    metric, k = sub.base.metric, sub.base.dim

    def make(a):
        return VectorField(lambda y: gram_schmidt(list(np.eye(k)), metric(y))[a])

    return [make(a) for a in range(k)]


def _frame_coords(E: np.ndarray, g: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Matrix of the endomorphism ``M`` in the orthonormal frame with rows ``E``."""
    return E @ g @ M @ E.T


def _frame_tensor(R: np.ndarray, E: np.ndarray) -> np.ndarray:
    return np.einsum("ijkl,ai,bj,ck,dl->abcd", R, E, E, E, E)


# -- structure equation ---------------------------------------------------------


def _structure_terms(sub: SubmersionInstance, p, Xt):
    ctx = point_context(sub, p)
    frame = submersion_frame(sub, ctx.point)
    g = ctx.metric
    X, V = ctx.Ph.val @ Xt, ctx.P.val @ Xt
    lhs_h = codiff_2form(sub.total, sub.structure, ctx.point, frame, X)
    lhs_v = codiff_2form(sub.total, sub.structure, ctx.point, frame, V)
    pb = base_point(sub, ctx.point)
    base = base_codiff(sub, pb, ctx.dpi @ X)
    H = mean_curvature(sub, ctx.point)
    tr = trace_B_h(sub, ctx.point)
    return {
        "lhs_h": lhs_h,
        "lhs_v": lhs_v,
        "base": base,
        "fibre": fibre_codiff(sub, ctx.point, V),
        "mean": float(H @ g @ (ctx.phi.val @ X)),
        "trace": 0.5 * float(tr @ g @ V),
    }


def _test_vectors(sub, p, test_vectors):
    frame = submersion_frame(sub, p)
    vecs = list(frame.vectors)
    if test_vectors is not None:
        vecs += [np.asarray(v, float) for v in test_vectors]
    return vecs


def structure_equation_check(sub, points, test_vectors=None, tol=DEFAULT_TOL) -> IdentityCheck:
    """delta Phi(X~) against delta' Omega(X') + delta^ Phi^(V) + g(H, phi X) + 1/2 g(Tr B^h, V)."""
    _contact_complex(sub)
    res, lhs_max = [], 0.0
    for p in points:
        worst = 0.0
        for Xt in _test_vectors(sub, p, test_vectors):
            t = _structure_terms(sub, p, Xt)
            lhs = t["lhs_h"] + t["lhs_v"]
            rhs = t["base"] + t["fibre"] + t["mean"] + t["trace"]
            worst = max(worst, abs(lhs - rhs))
            lhs_max = max(lhs_max, abs(lhs))
        res.append(worst)
    return _result("structure_equation", res, tol, {"max_abs_delta_phi": lhs_max})


def codif3_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Horizontal part: delta Phi(X) = g(H, phi X) + delta' Omega(X')."""
    _contact_complex(sub)
    res = []
    for p in points:
        worst = 0.0
        for Xt in submersion_frame(sub, p).horizontal:
            t = _structure_terms(sub, p, Xt)
            worst = max(worst, abs(t["lhs_h"] - t["mean"] - t["base"]))
        res.append(worst)
    return _result("codif3", res, tol)


def codif4_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Vertical part: delta Phi(V) = delta^ Phi^(V) + 1/2 g(Tr B^h, V)."""
    _contact_complex(sub)
    res, trace_max = [], 0.0
    for p in points:
        worst = 0.0
        for Vt in submersion_frame(sub, p).vertical:
            t = _structure_terms(sub, p, Vt)
            worst = max(worst, abs(t["lhs_v"] - t["fibre"] - t["trace"]))
            trace_max = max(trace_max, abs(t["trace"]))
        res.append(worst)
    return _result("codif4", res, tol, {"max_half_trace_term": trace_max})


def fibre_codiff_intrinsic_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Gauss-formula fibre codifferential against the intrinsic one on a fibre chart."""
    _contact_complex(sub)
    res = []
    for p in points:
        ctx = point_context(sub, p)
        fst = fibre_structure(sub, ctx.point)
        s0 = np.zeros(fst.patch.dim)
        fframe = structure_frame(fst, s0)
        E = np.array([np.asarray(f(ctx.point), float) for f in sub.vertical_frame]).T
        worst = 0.0
        for k in range(fst.patch.dim):
            intrinsic = codifferential(fst.patch, fst.phi, s0, fframe.vectors, np.eye(fst.patch.dim)[k])
            worst = max(worst, abs(intrinsic - fibre_codiff(sub, ctx.point, E[:, k])))
        res.append(worst)
    return _result("fibre_codiff_intrinsic", res, tol)


# -- Gray-type curvature conditions ------------------------------------------------

_GRAY_KINDS = ("K1", "K2", "K3", "K1phi", "K2phi", "K3phi")


def _twist(Rf, F, slots):
    out = Rf
    for s in slots:
        out = np.moveaxis(np.tensordot(out, F, axes=([s], [0])), -1, s)
    return out


def gray_residual(Rf: np.ndarray, F: np.ndarray, kind: str) -> np.ndarray:
    """Residual array of a Gray-type identity on a frame (``F`` = matrix of phi or J)."""
    base = kind.replace("phi", "")
    if base == "K1":
        return Rf - _twist(Rf, F, (2, 3))
    if base == "K2":
        return Rf - _twist(Rf, F, (0, 3)) - _twist(Rf, F, (1, 3)) - _twist(Rf, F, (2, 3))
    if base == "K3":
        return Rf - _twist(Rf, F, (0, 1, 2, 3))
    raise ValueError(f"unknown Gray condition {kind!r}")


def _gray_at(patch: ChartPatch, structure, kind: str, p) -> float:
    p = check_domain(patch, p)
    g = eval_metric(patch, p)
    if isinstance(structure, AlmostContactMetricStructure):
        E = structure_frame(structure, p).vectors
    else:
        E = structure.frame(p).vectors
    F = _frame_coords(E, g, structure.endo_at(p))
    Rf = _frame_tensor(riemann_tensor(patch, p), E)
    return float(np.max(np.abs(gray_residual(Rf, F, kind))))


def gray_check(patch, structure, kind, points, vector_tuples=None, tol=DEFAULT_TOL) -> IdentityCheck:
    """Max |LHS - RHS| of a Gray condition over all 4-tuples of an adapted frame.

    ``vector_tuples`` (iterable of (X, Y, Z, W)) replaces the frame tuples.
    """
    if kind not in _GRAY_KINDS:
        raise ValueError(f"kind must be one of {_GRAY_KINDS}")
    needs_phi = kind.endswith("phi")
    if needs_phi and not isinstance(structure, AlmostContactMetricStructure):
        raise MissingStructure(f"{kind} needs an almost contact metric structure")
    if not needs_phi and not isinstance(structure, AlmostHermitianStructure):
        raise MissingStructure(f"{kind} needs an almost Hermitian structure")
    res = []
    for p in points:
        if vector_tuples is None:
            res.append(_gray_at(patch, structure, kind, p))
            continue
        R = riemann_tensor(patch, p)
        M = structure.endo_at(p)
        r4 = lambda *v: float(np.einsum("ijkl,i,j,k,l->", R, *v))  # noqa: E731
        worst = 0.0
        for X, Y, Z, W in vector_tuples:
            X, Y, Z, W = (np.asarray(v, float) for v in (X, Y, Z, W))
            if kind.startswith("K1"):
                rhs = r4(X, Y, M @ Z, M @ W)
            elif kind.startswith("K2"):
                rhs = r4(M @ X, Y, Z, M @ W) + r4(X, M @ Y, Z, M @ W) + r4(X, Y, M @ Z, M @ W)
            else:
                rhs = r4(M @ X, M @ Y, M @ Z, M @ W)
            worst = max(worst, abs(r4(X, Y, Z, W) - rhs))
        res.append(worst)
    return _result(f"gray_{kind}", res, tol)


# -- curvature of submersions --------------------------------------------------------


def _fibre_riemann(sub, p):
    fp = fibre_patch(sub, p)
    return riemann_tensor(fp, np.zeros(fp.dim))


def _vertical_curvature_at(sub, p) -> float:
    ctx = point_context(sub, p)
    g = ctx.metric
    E = np.array([np.asarray(f(ctx.point), float) for f in sub.vertical_frame]).T
    U = np.array(gram_schmidt(list(E.T), g))  # orthonormal vertical rows
    C = np.linalg.solve(E.T @ g @ E, E.T @ g @ U.T).T  # fibre coordinates of U rows
    Rhat = np.einsum("ijkl,ai,bj,ck,dl->abcd", _fibre_riemann(sub, ctx.point), C, C, C, C)
    R = _frame_tensor(riemann_tensor(sub.total, ctx.point), U)
    Tf = np.einsum("iab,xa,yb->xyi", ctx.T, U, U)  # Tf[x, y] = T_{U_x} U_y
    TT = np.einsum("xyi,ij,zwj->xyzw", Tf, g, Tf)  # g(T_x y, T_z w)
    # g(T_U W, T_V F) at [U,V,F,W] and g(T_V W, T_U F)
    t1 = np.einsum("awbf->abfw", TT)
    t2 = np.einsum("bwaf->abfw", TT)
    return float(np.max(np.abs(R - (Rhat - t1 + t2))))


def _horizontal_curvature_at(sub, p) -> float:
    ctx = point_context(sub, p)
    g = ctx.metric
    Hf = np.array(gram_schmidt(submersion_frame(sub, ctx.point).horizontal, g))
    pb = base_point(sub, ctx.point)
    Rs = _frame_tensor(riemann_tensor(sub.base, pb), Hf @ ctx.dpi.T)
    R = _frame_tensor(riemann_tensor(sub.total, ctx.point), Hf)
    Af = np.einsum("iab,xa,yb->xyi", ctx.A, Hf, Hf)
    G = np.einsum("xyi,ij,zwj->xyzw", Af, g, Af)  # G[x,y,z,w] = g(A_x y, A_z w)
    rhs = (
        Rs
        + 2.0 * G
        - np.einsum("yzxh->xyzh", G)
        + np.einsum("xzyh->xyzh", G)
    )
    return float(np.max(np.abs(R - rhs)))


def curvature_submersion_check(sub, points, which="vertical", tol=DEFAULT_TOL) -> IdentityCheck:
    """Gauss-type (vertical) or O'Neill-type (horizontal) curvature equation residual."""
    if which == "vertical":
        res = [_vertical_curvature_at(sub, p) for p in points]
    elif which == "horizontal":
        res = [_horizontal_curvature_at(sub, p) for p in points]
    else:
        raise ValueError("which must be 'vertical' or 'horizontal'")
    return _result(f"curvature_{which}", res, tol, notes=(
        "T/A terms signed for the convention R(X,Y,Y,X) = +1 on the unit sphere",
    ))


# -- O'Neill tensors ---------------------------------------------------------------


def _basic_lifts(sub, p):
    return [lift_jet(sub, p, f) for f in _base_frame_fields(sub)]


def oneill_symmetry_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """T_U W = T_W U, A_X Y = -A_Y X and A_X Y = 1/2 v[X, Y] for basic X, Y."""
    res, d = [], {"T_symmetry": 0.0, "A_skew": 0.0, "A_bracket": 0.0}
    for p in points:
        ctx = point_context(sub, p)
        g = ctx.metric
        frame = submersion_frame(sub, ctx.point)
        V, H = frame.vertical, frame.horizontal
        ts = _max(_norm(g, tensor_apply(ctx.T, u, w) - tensor_apply(ctx.T, w, u)) for u in V for w in V)
        ak = _max(_norm(g, tensor_apply(ctx.A, x, y) + tensor_apply(ctx.A, y, x)) for x in H for y in H)
        lifts = _basic_lifts(sub, ctx.point)
        ab = _max(
            _norm(g, tensor_apply(ctx.A, X.val, Y.val) - 0.5 * ctx.P.val @ bracket_jets(X, Y))
            for X in lifts
            for Y in lifts
        )
        d = {k: max(d[k], v) for k, v in zip(d, (ts, ak, ab))}
        res.append(max(ts, ak, ab))
    return _result("oneill_symmetries", res, tol, d)


def horizontal_integrability_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """max |v[X, Y]| over lifts of an orthonormal base frame (zero iff H is involutive)."""
    res, amax = [], 0.0
    for p in points:
        ctx = point_context(sub, p)
        lifts = _basic_lifts(sub, ctx.point)
        br = _max(_norm(ctx.metric, ctx.P.val @ bracket_jets(X, Y)) for X in lifts for Y in lifts)
        amax = max(amax, _max(
            2.0 * _norm(ctx.metric, tensor_apply(ctx.A, X.val, Y.val)) for X in lifts for Y in lifts
        ))
        res.append(br)
    return _result("horizontal_integrability", res, tol, {"max_2A": amax})


def basic_connection_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """d pi (h nabla_X Y) = nabla'_{X'} Y' for basic X, Y."""
    res = []
    fields = _base_frame_fields(sub)
    for p in points:
        ctx = point_context(sub, p)
        pb = base_point(sub, ctx.point)
        gb = eval_metric(sub.base, pb)
        cb = christoffel(sub.base, pb)
        lifts = [lift_jet(sub, ctx.point, f) for f in fields]
        base_jets = [jet_of(f, pb) for f in fields]
        worst = 0.0
        for X, Xb in zip(lifts, base_jets):
            for Y, Yb in zip(lifts, base_jets):
                up = ctx.dpi @ (ctx.Ph.val @ covariant(ctx.chris, Y, X.val))
                worst = max(worst, _norm(gb, up - covariant(cb, Yb, Xb.val)))
        res.append(worst)
    return _result("basic_connection", res, tol)


def warped_T_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """T_U V = -(1/2f) g(U, V) grad f on vertical pairs of a warped product."""
    if "f" not in sub.params:
        raise MissingStructure(f"{sub.name} was not built as a warped product")
    f, df = sub.params["f"], sub.params["df"]
    res = []
    for p in points:
        ctx = point_context(sub, p)
        g = ctx.metric
        fx, dfx = float(f(ctx.point[0])), float(df(ctx.point[0]))
        grad = np.linalg.solve(g, np.eye(g.shape[0])[0]) * dfx
        V = gram_schmidt([np.asarray(v(ctx.point), float) for v in sub.vertical_frame], g)
        V += [np.asarray(v(ctx.point), float) for v in sub.vertical_frame]
        worst = 0.0
        for u in V:
            for w in V:
                pred = -(1.0 / (2.0 * fx)) * float(u @ g @ w) * grad
                worst = max(worst, _norm(g, tensor_apply(ctx.T, u, w) - pred))
        res.append(worst)
    return _result("warped_T", res, tol)


def totally_umbilical_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """T_U V = g(U, V) H / k on a k-dimensional fibre (totally umbilical fibres)."""
    res = []
    for p in points:
        ctx = point_context(sub, p)
        g = ctx.metric
        V = gram_schmidt([np.asarray(v(ctx.point), float) for v in sub.vertical_frame], g)
        Hk = mean_curvature(sub, ctx.point) / len(V)
        res.append(_max(
            _norm(g, tensor_apply(ctx.T, u, w) - float(u @ g @ w) * Hk) for u in V for w in V
        ))
    return _result("totally_umbilical", res, tol)


def pullback_omega_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Phi(X~, Y~) = Omega(d pi X~, d pi Y~) whenever one argument is horizontal."""
    _contact_complex(sub)
    res = []
    for p in points:
        ctx = point_context(sub, p)
        pb = base_point(sub, ctx.point)
        gb = eval_metric(sub.base, pb)
        Om = gb @ sub.base_structure.endo_at(pb)
        Ph = ctx.metric @ ctx.phi.val
        frame = submersion_frame(sub, ctx.point)
        worst = 0.0
        for x in frame.horizontal:
            for y in frame.vectors:
                for a, b in ((x, y), (y, x)):
                    worst = max(worst, abs(a @ Ph @ b - (ctx.dpi @ a) @ Om @ (ctx.dpi @ b)))
        res.append(worst)
    return _result("pullback_omega", res, tol)


# -- tensor B ----------------------------------------------------------------------


def _b_loop(name, sub, points, tol, fn, details=None) -> IdentityCheck:
    _contact_complex(sub)
    res = []
    for p in points:
        ctx = point_context(sub, p)
        res.append(fn(ctx, submersion_frame(sub, ctx.point)))
    return _result(name, res, tol, details)


def b_vertical_zero_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """B(V, .) = 0 for vertical V."""
    return _b_loop("b_vertical_zero", sub, points, tol, lambda c, f: _max(
        _norm(c.metric, tensor_apply(c.B, v, e)) for v in f.vertical for e in f.vectors
    ))


def b_symmetry_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """B(X, Y) = B(Y, X) on horizontal pairs."""
    return _b_loop("b_symmetry", sub, points, tol, lambda c, f: _max(
        _norm(c.metric, tensor_apply(c.B, x, y) - tensor_apply(c.B, y, x))
        for x in f.horizontal for y in f.horizontal
    ))


def b_j_invariance_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """B(phi X, phi Y) = B(X, Y) on horizontal pairs."""
    return _b_loop("b_j_invariance", sub, points, tol, lambda c, f: _max(
        _norm(c.metric, tensor_apply(c.B, c.phi.val @ x, c.phi.val @ y) - tensor_apply(c.B, x, y))
        for x in f.horizontal for y in f.horizontal
    ))


def b_formula_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """B(X, Y) = A_X phi Y - A_{phi X} Y on horizontal pairs."""
    return _b_loop("b_formula", sub, points, tol, lambda c, f: _max(
        _norm(c.metric, tensor_apply(c.B, x, y)
              - tensor_apply(c.A, x, c.phi.val @ y) + tensor_apply(c.A, c.phi.val @ x, y))
        for x in f.horizontal for y in f.horizontal
    ))


def b_value_type_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """B is vertical on horizontal pairs and horizontal on (horizontal, vertical) pairs."""
    def at(c, f):
        hv = _max(_norm(c.metric, c.Ph.val @ tensor_apply(c.B, x, y))
                  for x in f.horizontal for y in f.horizontal)
        vh = _max(_norm(c.metric, c.P.val @ tensor_apply(c.B, x, v))
                  for x in f.horizontal for v in f.vertical)
        return max(hv, vh)
    return _b_loop("b_value_type", sub, points, tol, at)


def b_phi_xi_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """B(phi X, xi) = h nabla_X xi for horizontal X; the size of B(phi X, xi) goes to details."""
    size = [0.0]

    def at(c, f):
        xi = f.vectors[-1]
        worst = 0.0
        xi_jet = jet_of(sub.structure.xi, c.point)
        for x in f.horizontal:
            b = tensor_apply(c.B, c.phi.val @ x, xi)
            size[0] = max(size[0], _norm(c.metric, b))
            worst = max(worst, _norm(c.metric, b - c.Ph.val @ covariant(c.chris, xi_jet, x)))
        return worst

    out = _b_loop("b_phi_xi", sub, points, tol, at)
    return IdentityCheck(
        out.name, out.residual_max, out.residual_mean, out.points_used, out.tolerance,
        out.passed, {"max_norm_B_phiX_xi": size[0]},
    )


def b_inner_product_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """g(B(X,Y), V) = g(nabla_V phi Y + phi nabla_V Y, X) + 2 V g(phi X, Y), X, Y basic."""
    _contact_complex(sub)
    res = []
    for p in points:
        ctx = point_context(sub, p)
        g = ctx.metric
        gj = jet_of(sub.total.metric, ctx.point)
        lifts = _basic_lifts(sub, ctx.point)
        frame = submersion_frame(sub, ctx.point)
        worst = 0.0
        for X in lifts:
            phX = ctx.phi @ X
            for Y in lifts:
                phY = ctx.phi @ Y
                # d_k g(phi X, Y)
                ds = (
                    np.einsum("ik,i->k", phX.d, g @ Y.val)
                    + np.einsum("i,ijk,j->k", phX.val, gj.d, Y.val)
                    + np.einsum("i,ik->k", g @ phX.val, Y.d)
                )
                for V in frame.vertical:
                    lhs = float(tensor_apply(ctx.B, X.val, Y.val) @ g @ V)
                    w = covariant(ctx.chris, phY, V) + ctx.phi.val @ covariant(ctx.chris, Y, V)
                    rhs = float(w @ g @ X.val) + 2.0 * float(ds @ V)
                    worst = max(worst, abs(lhs - rhs))
        res.append(worst)
    return _result("b_inner_product", res, tol)


# -- conditional transfer propositions ------------------------------------------------


def _conditional(name, hyps: dict, concl: dict, points_used, tol, notes=(), extra=None) -> IdentityCheck:
    """Residual = conclusion residual when every hypothesis residual is within ``tol``."""
    ok = all(v <= tol for v in hyps.values())
    details = {f"hypothesis_{k}": v for k, v in hyps.items()}
    details.update({f"conclusion_{k}": v for k, v in concl.items()})
    details.update(extra or {})
    details["hypotheses_hold"] = 1.0 if ok else 0.0
    resid = max(concl.values()) if ok else 0.0
    notes = tuple(notes) + (() if ok else ("hypotheses fail; implication holds vacuously",))
    return IdentityCheck(name, resid, resid, points_used, tol, resid <= tol, details, notes)


def _base_gray(sub, kind, points) -> float:
    return _max(_gray_at(sub.base, sub.base_structure, kind, base_point(sub, p)) for p in points)


def _total_gray(sub, kind, points) -> float:
    return _max(_gray_at(sub.total, sub.structure, kind, p) for p in points)


def _fibre_k1phi(sub, points) -> float:
    worst = 0.0
    for p in points:
        fst = fibre_structure(sub, p)
        worst = max(worst, _gray_at(fst.patch, fst, "K1phi", np.zeros(fst.patch.dim)))
    return worst


def _a_norm(sub, points) -> float:
    worst = 0.0
    for p in points:
        ctx = point_context(sub, p)
        f = submersion_frame(sub, ctx.point)
        worst = max(worst, _max(_norm(ctx.metric, tensor_apply(ctx.A, x, e))
                                for x in f.horizontal for e in f.vectors))
    return worst


def _a_phi_bilinear(sub, points) -> float:
    worst = 0.0
    for p in points:
        c = point_context(sub, p)
        f = submersion_frame(sub, c.point)
        ph = c.phi.val
        for x in f.horizontal:
            for y in f.horizontal:
                axy = ph @ tensor_apply(c.A, x, y)
                worst = max(worst,
                            _norm(c.metric, tensor_apply(c.A, ph @ x, y) - axy),
                            _norm(c.metric, tensor_apply(c.A, x, ph @ y) - axy))
    return worst


def _a_phi_swap(sub, points) -> float:
    worst = 0.0
    for p in points:
        c = point_context(sub, p)
        f = submersion_frame(sub, c.point)
        ph = c.phi.val
        worst = max(worst, _max(
            _norm(c.metric, tensor_apply(c.A, x, ph @ y) - tensor_apply(c.A, ph @ x, y))
            for x in f.horizontal for y in f.horizontal))
    return worst


def k1_transfer_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Total space K1phi: fibres satisfy K1phi; if moreover A = 0, the base satisfies K1."""
    _contact_complex(sub)
    hyps = {"total_K1phi": _total_gray(sub, "K1phi", points)}
    concl = {"fibre_K1phi": _fibre_k1phi(sub, points)}
    a = _a_norm(sub, points)
    if a <= tol:
        concl["base_K1"] = _base_gray(sub, "K1", points)
    notes = ("fibre condition checked directly; no phi-bilinearity predicate for T",)
    return _conditional("k1_transfer", hyps, concl, len(points), tol, notes, {"A_norm": a})


def integrability_transfer_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """K1phi on M, K1 on N and B(X, X) = 0 on H force H to be integrable (A = 0)."""
    _contact_complex(sub)
    bxx = 0.0
    for p in points:
        c = point_context(sub, p)
        f = submersion_frame(sub, c.point)
        bxx = max(bxx, _max(_norm(c.metric, tensor_apply(c.B, x, x)) for x in f.horizontal))
    hyps = {
        "total_K1phi": _total_gray(sub, "K1phi", points),
        "base_K1": _base_gray(sub, "K1", points),
        "B_XX": bxx,
    }
    return _conditional("integrability_transfer", hyps, {"A_norm": _a_norm(sub, points)},
                        len(points), tol)


def k2_transfer_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """K2phi on M with A phi-bilinear gives K2 on the base."""
    _contact_complex(sub)
    hyps = {"total_K2phi": _total_gray(sub, "K2phi", points),
            "A_phi_bilinear": _a_phi_bilinear(sub, points)}
    return _conditional("k2_transfer", hyps, {"base_K2": _base_gray(sub, "K2", points)},
                        len(points), tol)


def k3_transfer_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """K3phi on M with A_X phi Y = A_{phi X} Y gives K3 on the base."""
    _contact_complex(sub)
    hyps = {"total_K3phi": _total_gray(sub, "K3phi", points),
            "A_phi_swap": _a_phi_swap(sub, points)}
    return _conditional("k3_transfer", hyps, {"base_K3": _base_gray(sub, "K3", points)},
                        len(points), tol)


# -- almost cosymplectic manifolds with Kaehler leaves ---------------------------------


def almost_cosymplectic_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """d Phi = 0 and d eta = 0."""
    res = [classify(structure, [p])["almost_cosymplectic_residual"] for p in points]
    return _result("almost_cosymplectic", res, tol)


def a_star_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """A* symmetric, anticommuting with phi, killing xi, and (nabla phi) in A* form."""
    res, d = [], {"e1": 0.0, "e2": 0.0, "e3": 0.0}
    for p in points:
        e = check_a_star_identities(structure, [p])
        d = {k: max(d[k], e[k]) for k in d}
        res.append(max(e.values()))
    return _result("a_star_identities", res, tol, d)


def _coordinate_fields(dim):
    return [VectorField.constant(np.eye(dim)[k]) for k in range(dim)]


def n2_n4_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """N2 and N4 vanish (evaluated on coordinate fields)."""
    res, n1, n3 = [], 0.0, 0.0
    fields = _coordinate_fields(structure.patch.dim)
    for p in points:
        g = eval_metric(structure.patch, p)
        worst = 0.0
        for X in fields:
            for Y in fields:
                t = n_tensors(structure, p, X, Y)
                worst = max(worst, abs(t["N2"]), abs(t["N4"]))
                n1 = max(n1, _norm(g, t["N1"]))
                n3 = max(n3, _norm(g, t["N3"]))
        res.append(worst)
    return _result("n2_n4", res, tol, {"max_N1": n1, "max_N3": n3})


def _n3_and_cosym(structure, p):
    g = eval_metric(structure.patch, p)
    fields = _coordinate_fields(structure.patch.dim)
    n3 = _max(_norm(g, n_tensors(structure, p, X, X)["N3"]) for X in fields)
    cos = classify(structure, [p])["cosymplectic_residual"]
    return n3, cos


def n3_cosymplectic_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """N3 = 0 exactly when the structure is cosymplectic.

    Per point the residual is 0 when both sides are clearly nonzero and
    max(|N3|, cosymplectic residual) otherwise, so a one-sided vanishing
    fails.
    """
    res, n3max, cmax = [], 0.0, 0.0
    for p in points:
        n3, cos = _n3_and_cosym(structure, p)
        n3max, cmax = max(n3max, n3), max(cmax, cos)
        res.append(0.0 if (n3 > tol and cos > tol) else max(n3, cos))
    return _result("n3_cosymplectic", res, tol, {"max_N3": n3max, "max_cosymplectic_residual": cmax})


def harmonicity_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """d Phi = 0 and delta Phi = 0."""
    res, d = [], {"dPhi_max": 0.0, "deltaPhi_max": 0.0}
    for p in points:
        h = harmonicity_residual(structure, [p])
        d = {k: max(d[k], h[k]) for k in d}
        res.append(max(h.values()))
    return _result("harmonicity", res, tol, d)


def kahler_base_criterion_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Base Kaehler (N_J = 0 and nabla' J = 0) exactly when A_X xi = 0 on H.

    Requires an almost cosymplectic total space with Kaehler leaves.  Per
    point the residual is max(a, b) unless both sides are clearly nonzero,
    where a = max |A_X xi| and b = max(|N_J|, |nabla' J|).
    """
    _contact_complex(sub)
    st = sub.structure
    gate = max(max(classify(st, [p])["almost_cosymplectic_residual"],
                   check_a_star_identities(st, [p])["e3"]) for p in points[:5])
    if gate > 1e-8:
        raise PreconditionNotMet(
            f"{sub.name} is not almost cosymplectic with Kaehler leaves (residual {gate:.2e})"
        )
    res, amax, bmax = [], 0.0, 0.0
    k = sub.base.dim
    base_fields = _coordinate_fields(k)
    for p in points:
        ctx = point_context(sub, p)
        f = submersion_frame(sub, ctx.point)
        xi = f.vectors[-1]
        a = _max(_norm(ctx.metric, tensor_apply(ctx.A, x, xi)) for x in f.horizontal)
        pb = base_point(sub, ctx.point)
        gb = eval_metric(sub.base, pb)
        Jj = jet_of(sub.base_structure.J, pb)
        nj = _max(
            _norm(gb, nijenhuis(Jj, jet_of(X, pb), jet_of(Y, pb)))
            for X in base_fields for Y in base_fields
        )
        D = nabla_endo(sub.base, sub.base_structure.J, pb)
        bf = sub.base_structure.frame(pb).vectors
        nab = _max(_norm(gb, np.einsum("ijk,k,j->i", D, x, y)) for x in bf for y in bf)
        b = max(nj, nab)
        amax, bmax = max(amax, a), max(bmax, b)
        res.append(0.0 if (a > tol and b > tol) else max(a, b))
    return _result("kahler_base", res, tol, {"max_A_X_xi": amax, "max_base_non_kaehler": bmax})


# -- Sasakian ------------------------------------------------------------------------


def sasakian_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """(nabla_X phi) Y = g(X, Y) xi - eta(Y) X."""
    res = [classify(structure, [p])["sasakian_residual"] for p in points]
    deta = _max(float(np.max(np.abs(ext_deriv_1form_components(structure.eta, p)))) for p in points)
    return _result("sasakian", res, tol, {"max_abs_d_eta": deta})


def sasakian_codiff_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """delta Phi = 2n eta on a Sasakian manifold of dimension 2n + 1."""
    n = (structure.patch.dim - 1) // 2
    res = []
    for p in points:
        frame = structure_frame(structure, p)
        eta = structure.eta_at(p)
        D = structure.nabla_phi(p)
        res.append(_max(
            abs(codifferential(structure.patch, structure.phi, p, frame.vectors, e, D) - 2 * n * float(eta @ e))
            for e in frame.vectors
        ))
    return _result("sasakian_codiff", res, tol)


# -- structural and numerical substrate ------------------------------------------------


def structure_axioms_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """phi^2 = -I + eta (x) xi, eta(xi) = 1, metric compatibility and derived identities."""
    res, d = [], {}
    for p in points:
        r = structure.axiom_residuals(p)
        for k, v in r.items():
            d[k] = max(d.get(k, 0.0), v)
        res.append(max(r.values()))
    return _result("structure_axioms", res, tol, d)


def fundamental_form_check(structure, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Phi antisymmetric and Phi(xi, .) = 0."""
    Phi = fundamental_form_field(structure)
    res = []
    for p in points:
        F = np.asarray(Phi(np.asarray(p, float)), float)
        E = structure_frame(structure, p).vectors
        Ff = E @ F @ E.T
        res.append(max(float(np.max(np.abs(Ff + Ff.T))), float(np.max(np.abs(structure.xi_at(p) @ F)))))
    return _result("fundamental_form", res, tol)


def submersion_residuals_check(sub, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """d pi V = 0, d pi isometric on H, J d pi = d pi phi, projector vs numerical kernel."""
    res, d = [], {"vertical": 0.0, "riemannian": 0.0, "holomorphic": 0.0, "kernel": 0.0}
    for p in points:
        r = instance_residuals(sub, p)
        ctx = point_context(sub, p)
        K = nullspace(ctx.dpi)  # euclidean kernel basis
        r["kernel"] = float(np.max(np.abs(ctx.P.val @ K.T - K.T))) if K.size else 0.0
        if K.shape[0] != sub.fibre_dim:
            r["kernel"] = float("inf")
        d = {k: max(d[k], r[k]) for k in d}
        res.append(max(r.values()))
    return _result("submersion_residuals", res, tol, d)


_FD_GRAD_STEP = 1e-5
_FD_HESS_STEP = 1e-4


def ad_vs_fd_check(patch, points, tol=1e-6) -> IdentityCheck:
    """AD gradients and Hessians of the metric against central differences (relative)."""
    res = []
    n = patch.dim
    f = lambda x: np.asarray(patch.metric(x), float)  # noqa: E731
    for p in points:
        p = np.asarray(p, float)
        _, grad, hess = dual.d2_eval(patch.metric, p, order=2)
        worst = 0.0
        for k in range(n):
            e = np.eye(n)[k]
            h = _FD_GRAD_STEP
            fd = (f(p + h * e) - f(p - h * e)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(grad[..., k] - fd) / np.maximum(1.0, np.abs(fd)))))
            for m in range(k, n):
                em = np.eye(n)[m]
                h = _FD_HESS_STEP
                fd2 = (
                    f(p + h * e + h * em) - f(p + h * e - h * em)
                    - f(p - h * e + h * em) + f(p - h * e - h * em)
                ) / (4 * h * h)
                worst = max(worst, float(np.max(np.abs(hess[..., k, m] - fd2) / np.maximum(1.0, np.abs(fd2)))))
        res.append(worst)
    return _result("ad_vs_fd", res, tol, notes=(
        f"central differences, gradient step {_FD_GRAD_STEP:g}, Hessian step {_FD_HESS_STEP:g}",
    ))


def _test_fields(patch, structure=None) -> list:
    n = patch.dim
    fields = _coordinate_fields(n)
    # a non-constant field: (x1 x0, x2 x1, ..., sin x0)
    fields.append(VectorField(lambda x: np.array(
        [x[k + 1] * x[k] for k in range(n - 1)] + [dual.sin(x[0])], dtype=object)))
    if structure is not None:
        fields.append(structure.xi)
        for k in range(n):
            fields.append(VectorField(lambda x, k=k: structure.phi(x) @ np.eye(n)[k]))
    return fields


def _clip(patch, points):
    return [check_domain(patch, p) for p in points]


def torsion_free_check(patch, points, structure=None, tol=DEFAULT_TOL) -> IdentityCheck:
    """nabla_X Y - nabla_Y X - [X, Y] = 0 on coordinate, polynomial and structure fields."""
    fields = _test_fields(patch, structure)
    res = []
    for p in _clip(patch, points):
        c = christoffel(patch, p)
        g = c.metric
        jets = [jet_of(as_vector_field(F), p) for F in fields]
        res.append(_max(
            _norm(g, covariant(c, Y, X.val) - covariant(c, X, Y.val) - bracket_jets(X, Y))
            for X in jets for Y in jets
        ))
    return _result("torsion_free", res, tol)


def metric_compatibility_check(patch, points, structure=None, tol=DEFAULT_TOL) -> IdentityCheck:
    """X g(Y, Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z) and the coordinate form nabla g = 0."""
    fields = _test_fields(patch, structure)
    res = []
    for p in _clip(patch, points):
        c = christoffel(patch, p)
        g = c.metric
        gj = jet_of(patch.metric, p)
        jets = [jet_of(as_vector_field(F), p) for F in fields]
        V = np.array([j.val for j in jets])  # V[f, i]
        dV = np.array([j.d for j in jets])  # dV[f, i, k]
        E = np.array(gram_schmidt(list(np.eye(patch.dim)), g))  # E[x, k]
        # directional derivatives along frame vectors: d_x g(Y_f, Z_h)
        lhs = (
            np.einsum("fik,ij,hj,xk->fhx", dV, g, V, E)
            + np.einsum("fi,ijk,hj,xk->fhx", V, gj.d, V, E)
            + np.einsum("fi,ij,hjk,xk->fhx", V, g, dV, E)
        )
        nab = np.einsum("fik,xk->fxi", dV, E) + np.einsum("ikl,xk,fl->fxi", c.gamma, E, V)  # nabla_x Y_f
        rhs = np.einsum("fxi,ij,hj->fhx", nab, g, V) + np.einsum("fi,ij,hxj->fhx", V, g, nab)
        res.append(max(c.metric_compatibility_residual(), float(np.max(np.abs(lhs - rhs)))))
    return _result("metric_compatibility", res, tol)


def riemann_symmetries_check(patch, points, tol=DEFAULT_TOL) -> IdentityCheck:
    """Antisymmetry in both pairs, pair interchange and the first Bianchi identity."""
    res, d = [], {"antisym_12": 0.0, "antisym_34": 0.0, "pair": 0.0, "bianchi": 0.0}
    for p in _clip(patch, points):
        g = eval_metric(patch, p)
        E = np.array(gram_schmidt(list(np.eye(patch.dim)), g))
        R = _frame_tensor(riemann_tensor(patch, p), E)
        vals = (
            float(np.max(np.abs(R + R.transpose(1, 0, 2, 3)))),
            float(np.max(np.abs(R + R.transpose(0, 1, 3, 2)))),
            float(np.max(np.abs(R - R.transpose(2, 3, 0, 1)))),
            float(np.max(np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)))),
        )
        d = {k: max(d[k], v) for k, v in zip(d, vals)}
        res.append(max(vals))
    return _result("riemann_symmetries", res, tol, d)


def codiff_frame_independence_check(structure, points, sub=None, tol=DEFAULT_TOL) -> IdentityCheck:
    """delta Phi agrees on two independently built adapted frames."""
    res = []
    n = structure.patch.dim
    rng = np.random.default_rng(1234)
    mix = rng.normal(size=(n, n)) + 3.0 * np.eye(n)
    for p in _clip(structure.patch, points):
        g = eval_metric(structure.patch, p)
        f1 = submersion_frame(sub, p) if sub is not None else structure_frame(structure, p)
        xi = structure.xi_at(p)
        comp = complement_basis(g, [xi])
        mixed = [sum(mix[i, j] * comp[j] for j in range(len(comp))) for i in range(len(comp))]
        f2 = phi_adapted_frame(structure.patch, structure, p, [xi], mixed[::-1])
        D = structure.nabla_phi(p)
        worst = 0.0
        for X in np.eye(n):
            a = codifferential(structure.patch, structure.phi, p, f1.vectors, X, D)
            b = codifferential(structure.patch, structure.phi, p, f2.vectors, X, D)
            worst = max(worst, abs(a - b))
        res.append(worst)
    return _result("codiff_frame_independence", res, tol)
