"""Closed-form example manifolds, structures and submersions.

Every builder checks its output (metric positivity, almost contact axioms,
submersion residuals, and class-specific identities) at seeded points and
raises ConstructionInvalid if anything is off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import dual
from .chart import ChartPatch, EndoField, OneFormField, VectorField, eval_metric
from .errors import ConstructionInvalid, UnknownExample
from .sampling import sample_points
from .structures import (
    AlmostContactMetricStructure,
    AlmostHermitianStructure,
    check_a_star_identities,
    classify,
)
from .submersion import SubmersionInstance, instance_residuals

__all__ = [
    "Example",
    "ExampleSpec",
    "EXAMPLES",
    "build",
    "example",
    "build_hopf_s3",
    "build_cosymplectic_product",
    "build_warped",
    "build_olszak_r3",
    "build_olszak_fibred",
    "build_flat_cosymplectic_r5",
    "HOPF_THETA_MARGIN",
]

HOPF_THETA_MARGIN = 0.1
VERIFY_POINTS = 100
VERIFY_SEED = 7
_AXIOM_TOL = 1e-10
_SUBMERSION_TOL = 1e-9
_CLASS_TOL = 1e-8


def _matrix(rows) -> np.ndarray:
    """Object array from nested rows (entries may be floats or AD scalars)."""
    n, m = len(rows), len(rows[0])
    out = np.empty((n, m), dtype=object)
    for i in range(n):
        for j in range(m):
            out[i, j] = rows[i][j]
    return out


def _diag(*entries) -> np.ndarray:
    n = len(entries)
    return _matrix([[entries[i] if i == j else 0.0 for j in range(n)] for i in range(n)])


def _vector(*entries) -> np.ndarray:
    out = np.empty(len(entries), dtype=object)
    for i, e in enumerate(entries):
        out[i] = e
    return out


def _block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    out = _matrix([[0.0] * (n + m) for _ in range(n + m)])
    out[:n, :n] = a
    out[n:, n:] = b
    return out


@dataclass(frozen=True, eq=False)
class Example:
    """A built catalog entry: a submersion, a bare structure, or both views."""

    name: str
    tags: frozenset
    patch: ChartPatch
    submersion: SubmersionInstance | None = None
    structure: AlmostContactMetricStructure | None = None
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    builder: Callable
    parameters: dict
    tags: frozenset
    description: str


# -- verification ---------------------------------------------------------------


def _verify_points(patch: ChartPatch) -> np.ndarray:
    return sample_points(patch.lower, patch.upper, VERIFY_POINTS, VERIFY_SEED)


def _verify_structure(st: AlmostContactMetricStructure) -> None:
    for p in _verify_points(st.patch):
        eval_metric(st.patch, p)
        worst = max(st.axiom_residuals(p).values())
        if worst > _AXIOM_TOL:
            raise ConstructionInvalid(f"{st.name}: almost contact axioms fail ({worst:.2e})")


def _verify_hermitian(hs: AlmostHermitianStructure) -> None:
    for p in _verify_points(hs.patch):
        worst = max(hs.axiom_residuals(p).values())
        if worst > _AXIOM_TOL:
            raise ConstructionInvalid(f"{hs.name}: almost Hermitian axioms fail ({worst:.2e})")


def _verify_submersion(sub: SubmersionInstance) -> None:
    if sub.structure is not None:
        _verify_structure(sub.structure)
    if sub.base_structure is not None:
        _verify_hermitian(sub.base_structure)
    for p in _verify_points(sub.total):
        eval_metric(sub.total, p)
        res = instance_residuals(sub, p)
        worst = max(res.values())
        if worst > _SUBMERSION_TOL:
            raise ConstructionInvalid(f"{sub.name}: submersion residuals {res}")
    sub._memo.clear()


# -- Hopf fibration ---------------------------------------------------------------


def build_hopf_s3() -> SubmersionInstance:
    """S^3 -> S^2(1/2) in Hopf coordinates (theta, phi1, phi2) with its Sasakian structure."""
    m = HOPF_THETA_MARGIN
    total = ChartPatch(
        3,
        (m, -1.0, -1.0),
        (np.pi / 2 - m, 1.0, 1.0),
        lambda x: _diag(1.0, dual.cos(x[0]) ** 2, dual.sin(x[0]) ** 2),
        name="hopf_s3",
    )

    def phi(x):
        c, s = dual.cos(x[0]), dual.sin(x[0])
        return _matrix([[0.0, -s * c, s * c], [s / c, 0.0, 0.0], [-c / s, 0.0, 0.0]])

    def eta(x):
        return _vector(0.0, dual.cos(x[0]) ** 2, dual.sin(x[0]) ** 2)

    xi = VectorField.constant([0.0, 1.0, 1.0])
    st = AlmostContactMetricStructure(total, EndoField(phi), xi, OneFormField(eta), name="sasakian_s3")

    base = ChartPatch(
        2,
        (2 * m, -2.0),
        (np.pi - 2 * m, 2.0),
        lambda y: _diag(0.25, 0.25 * dual.sin(y[0]) ** 2),
        name="s2_half",
    )

    def J(y):
        s = dual.sin(y[0])
        return _matrix([[0.0, s], [-1.0 / s, 0.0]])

    hs = AlmostHermitianStructure(base, EndoField(J), name="s2_half_J")
    sub = SubmersionInstance(
        "hopf_s3",
        total,
        base,
        lambda x: _vector(2.0 * x[0], x[2] - x[1]),
        (xi,),
        st,
        hs,
    )
    _verify_submersion(sub)
    if classify(st, _verify_points(total)[:10])["sasakian_residual"] > _CLASS_TOL:
        raise ConstructionInvalid("hopf_s3: structure is not Sasakian")
    return sub


# -- cosymplectic products N x R ---------------------------------------------------


def _rotation(x):
    return _matrix([[0.0, -1.0], [1.0, 0.0]])


def build_cosymplectic_product(base_kind: str = "flat_R2") -> SubmersionInstance:
    """N x R with xi = d/dt, eta = dt, phi = J on TN, projected to N."""
    if base_kind == "flat_R2":
        lower, upper = (-1.0, -1.0), (1.0, 1.0)
        gN = lambda y: _diag(1.0, 1.0)  # noqa: E731
        JN = _rotation
    elif base_kind == "round_S2":
        lower, upper = (0.3, -1.0), (np.pi - 0.3, 1.0)
        gN = lambda y: _diag(1.0, dual.sin(y[0]) ** 2)  # noqa: E731

        def JN(y):
            s = dual.sin(y[0])
            return _matrix([[0.0, s], [-1.0 / s, 0.0]])

    else:
        raise UnknownExample(f"unknown product base {base_kind!r}")

    total = ChartPatch(
        3,
        lower + (-1.0,),
        upper + (1.0,),
        lambda x: _block(gN(x[:2]), _diag(1.0)),
        name=f"product_{base_kind}",
    )
    xi = VectorField.constant([0.0, 0.0, 1.0])
    st = AlmostContactMetricStructure(
        total,
        EndoField(lambda x: _block(JN(x[:2]), _diag(0.0))),
        xi,
        OneFormField(lambda x: np.array([0.0, 0.0, 1.0])),
        name=f"cosymplectic_{base_kind}",
    )
    base = ChartPatch(2, lower, upper, gN, name=base_kind)
    hs = AlmostHermitianStructure(base, EndoField(JN), name=f"{base_kind}_J")
    sub = SubmersionInstance(
        f"product_{base_kind}", total, base, lambda x: _vector(x[0], x[1]), (xi,), st, hs
    )
    _verify_submersion(sub)
    return sub


# -- warped products R x_f R^k -----------------------------------------------------

_WARPS = {
    "quadratic": (lambda x: 1.0 + x * x, lambda x: 2.0 * x),
    "exponential": (lambda x: dual.exp(x), lambda x: dual.exp(x)),
    "constant": (lambda x: 1.0 + 0.0 * x, lambda x: 0.0 * x),
}


def build_warped(f_kind: str = "quadratic", fibre_dim: int = 1) -> SubmersionInstance:
    """g = dx^2 + f(x) |dy|^2 on R x R^k, projected to (R, dx^2); no contact data."""
    if f_kind not in _WARPS:
        raise UnknownExample(f"unknown warping function {f_kind!r}")
    if fibre_dim < 1:
        raise ConstructionInvalid("fibre_dim must be positive")
    f, df = _WARPS[f_kind]
    k = fibre_dim
    total = ChartPatch(
        1 + k,
        (-1.5,) + (-1.0,) * k,
        (1.5,) + (1.0,) * k,
        lambda x: _diag(1.0, *([f(x[0])] * k)),
        name=f"warped_{f_kind}",
    )
    base = ChartPatch(1, (-1.5,), (1.5,), lambda y: _diag(1.0), name="line")
    frame = tuple(VectorField.constant(np.eye(1 + k)[1 + j]) for j in range(k))
    sub = SubmersionInstance(
        f"warped_{f_kind}",
        total,
        base,
        lambda x: _vector(x[0]),
        frame,
        params={"f": f, "df": df, "f_kind": f_kind},
    )
    _verify_submersion(sub)
    return sub


# -- almost cosymplectic structures with Kaehler leaves ------------------------------

_OLSZAK = {
    "exp": lambda z: dual.exp(2.0 * z),
    "constant": lambda z: 1.0 + 0.0 * z,
}


def _olszak_blocks(f_kind: str):
    if f_kind not in _OLSZAK:
        raise UnknownExample(f"unknown Olszak profile {f_kind!r}")
    f = _OLSZAK[f_kind]

    def metric(x):  # x = (x, y, z)
        fz = f(x[2])
        return _diag(fz, 1.0 / fz, 1.0)

    def phi(x):
        fz = f(x[2])
        return _matrix([[0.0, -1.0 / fz, 0.0], [fz, 0.0, 0.0], [0.0, 0.0, 0.0]])

    return metric, phi


def _verify_olszak(st: AlmostContactMetricStructure) -> None:
    _verify_structure(st)
    pts = _verify_points(st.patch)
    cls = classify(st, pts)
    e = check_a_star_identities(st, pts)
    worst = max(cls["almost_cosymplectic_residual"], e["e3"])
    if worst > _CLASS_TOL:
        raise ConstructionInvalid(f"{st.name}: d Phi, d eta or (nabla phi) identity fails ({worst:.2e})")


def build_olszak_r3(f_kind: str = "exp") -> AlmostContactMetricStructure:
    """R^3 with g = f dx^2 + f^-1 dy^2 + dz^2, xi = d/dz, eta = dz, phi dx = f dy, phi dy = -f^-1 dx."""
    metric, phi = _olszak_blocks(f_kind)
    patch = ChartPatch(3, (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0), metric, name=f"olszak_{f_kind}")
    st = AlmostContactMetricStructure(
        patch,
        EndoField(phi),
        VectorField.constant([0.0, 0.0, 1.0]),
        OneFormField(lambda x: np.array([0.0, 0.0, 1.0])),
        name=f"olszak_{f_kind}",
    )
    _verify_olszak(st)
    return st


def build_olszak_fibred(f_kind: str = "exp") -> SubmersionInstance:
    """Flat Kaehler R^2 times the Olszak R^3, projected onto the R^2 factor."""
    metric, phi = _olszak_blocks(f_kind)
    total = ChartPatch(
        5,
        (-1.0,) * 5,
        (1.0,) * 5,
        lambda x: _block(_diag(1.0, 1.0), metric(x[2:])),
        name=f"olszak_fibred_{f_kind}",
    )
    xi = VectorField.constant([0.0, 0.0, 0.0, 0.0, 1.0])
    st = AlmostContactMetricStructure(
        total,
        EndoField(lambda x: _block(_rotation(x[:2]), phi(x[2:]))),
        xi,
        OneFormField(lambda x: np.array([0.0, 0.0, 0.0, 0.0, 1.0])),
        name=f"olszak_fibred_{f_kind}",
    )
    base = ChartPatch(2, (-1.0, -1.0), (1.0, 1.0), lambda y: _diag(1.0, 1.0), name="flat_R2")
    hs = AlmostHermitianStructure(base, EndoField(_rotation), name="flat_R2_J")
    frame = tuple(VectorField.constant(np.eye(5)[k]) for k in (2, 3, 4))
    sub = SubmersionInstance(
        f"olszak_fibred_{f_kind}", total, base, lambda x: _vector(x[0], x[1]), frame, st, hs
    )
    _verify_olszak(st)
    _verify_submersion(sub)
    return sub


def build_flat_cosymplectic_r5() -> SubmersionInstance:
    """Flat R^4 x R with the constant cosymplectic structure, projected to R^4."""
    J4 = lambda y: _block(_rotation(y), _rotation(y))  # noqa: E731
    total = ChartPatch(5, (-1.0,) * 5, (1.0,) * 5, lambda x: _diag(*([1.0] * 5)), name="flat_r5")
    xi = VectorField.constant(np.eye(5)[4])
    st = AlmostContactMetricStructure(
        total,
        EndoField(lambda x: _block(J4(x), _diag(0.0))),
        xi,
        OneFormField(lambda x: np.eye(5)[4]),
        name="flat_cosymplectic_r5",
    )
    base = ChartPatch(4, (-1.0,) * 4, (1.0,) * 4, lambda y: _diag(*([1.0] * 4)), name="flat_R4")
    hs = AlmostHermitianStructure(base, EndoField(J4), name="flat_R4_J")
    sub = SubmersionInstance(
        "flat_cosymplectic_r5", total, base, lambda x: _vector(*x[:4]), (xi,), st, hs
    )
    _verify_submersion(sub)
    return sub


# -- registry -----------------------------------------------------------------------

_CC = frozenset({"submersion", "contact", "contact_complex"})
_ACKL = frozenset({"almost_cosymplectic_kl"})


def _spec(name, builder, params, tags, description):
    return ExampleSpec(name, builder, dict(params), frozenset(tags), description)


EXAMPLES: dict = {
    s.name: s
    for s in [
        _spec("hopf_s3", build_hopf_s3, {}, _CC | {"sasakian", "complex_base"},
              "Hopf fibration S^3 -> S^2(1/2), Sasakian total space"),
        _spec("product_flat_r2", build_cosymplectic_product, {"base_kind": "flat_R2"},
              _CC | _ACKL | {"cosymplectic", "complex_base", "integrable_h", "flat"},
              "flat R^2 x R, cosymplectic"),
        _spec("product_round_s2", build_cosymplectic_product, {"base_kind": "round_S2"},
              _CC | _ACKL | {"cosymplectic", "complex_base", "integrable_h"},
              "round S^2 x R, cosymplectic"),
        _spec("warped_quadratic", build_warped, {"f_kind": "quadratic"},
              {"submersion", "warped", "umbilical", "integrable_h"}, "R x_f R with f = 1 + x^2"),
        _spec("warped_exponential", build_warped, {"f_kind": "exponential"},
              {"submersion", "warped", "umbilical", "integrable_h"}, "R x_f R with f = e^x"),
        _spec("warped_constant", build_warped, {"f_kind": "constant"},
              {"submersion", "warped", "umbilical", "integrable_h", "flat"}, "R x_f R with f = 1"),
        _spec("olszak_exp", build_olszak_r3, {"f_kind": "exp"},
              {"contact", "olszak"} | _ACKL, "Olszak-type R^3 with f = e^{2z}"),
        _spec("olszak_constant", build_olszak_r3, {"f_kind": "constant"},
              {"contact", "olszak", "cosymplectic", "flat"} | _ACKL,
              "Olszak-type R^3 with f = 1 (flat cosymplectic)"),
        _spec("olszak_fibred_exp", build_olszak_fibred, {"f_kind": "exp"},
              _CC | _ACKL | {"complex_base", "integrable_h"},
              "R^2 x Olszak R^3 (f = e^{2z}) over flat R^2"),
        _spec("olszak_fibred_constant", build_olszak_fibred, {"f_kind": "constant"},
              _CC | _ACKL | {"complex_base", "integrable_h", "cosymplectic", "flat"},
              "R^2 x flat cosymplectic R^3 over flat R^2"),
        _spec("flat_cosymplectic_r5", build_flat_cosymplectic_r5, {},
              _CC | _ACKL | {"cosymplectic", "complex_base", "integrable_h", "flat"},
              "flat R^4 x R over R^4"),
    ]
}


def build(name: str) -> Example:
    """Build a fresh catalog entry by name."""
    try:
        spec = EXAMPLES[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; see `list`") from None
    obj = spec.builder(**spec.parameters)
    if isinstance(obj, SubmersionInstance):
        return Example(name, spec.tags, obj.total, obj, obj.structure, dict(spec.parameters))
    return Example(name, spec.tags, obj.patch, None, obj, dict(spec.parameters))


@lru_cache(maxsize=None)
def example(name: str) -> Example:
    """Cached :func:`build` (instances are immutable apart from their caches)."""
    return build(name)
