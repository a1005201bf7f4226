"""Check registry, batch runner and report serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import identities as I
from .catalog import EXAMPLES, Example, example
from .errors import ConfigError, PreconditionNotMet, UnknownCheck, UnknownExample
from .sampling import DEFAULT_SEED, sample_points

__all__ = [
    "CheckSpec",
    "CHECKS",
    "CONVENTIONS",
    "RunConfig",
    "Report",
    "applicable_checks",
    "run",
    "emit",
]

CONVENTIONS = {
    "curvature": "R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_[X,Y]Z, R(X,Y,Z,W) = g(R(X,Y)Z, W); unit sphere R(X,Y,Y,X) = +1",
    "mean_curvature": "H = sum over a vertical orthonormal frame (xi included) of h nabla_E E, no 1/dim factor",
    "codifferential": "delta Phi(X) = -sum_a (nabla_{e_a} Phi)(e_a, X), (nabla_X Phi)(Y, Z) = -g((nabla_X phi) Y, Z)",
    "exterior_derivative": "d eta(X, Y) = X eta(Y) - Y eta(X) - eta([X, Y]); N1 uses d eta / 2",
}


@dataclass(frozen=True)
class CheckSpec:
    """``needs``: data the example must carry for the check to run at all;
    ``classes``: structure classes the identity is expected to hold on
    (only used to pick the checks behind ``all``)."""

    name: str
    needs: frozenset
    classes: frozenset
    runner: Callable  # (Example, points, tol) -> IdentityCheck
    description: str

    @property
    def tags(self) -> frozenset:
        return self.needs | self.classes


def _sub(fn):
    return lambda ex, pts, tol: fn(ex.submersion, pts, tol=tol)


def _st(fn):
    return lambda ex, pts, tol: fn(ex.structure, pts, tol=tol)


def _patch(fn):
    return lambda ex, pts, tol: fn(ex.patch, pts, tol=tol)


def _with_structure(fn):
    return lambda ex, pts, tol: fn(ex.patch, pts, structure=ex.structure, tol=tol)


def _gray_total(ex, pts, tol):
    checks = [I.gray_check(ex.patch, ex.structure, k, pts, tol=tol) for k in ("K1phi", "K2phi", "K3phi")]
    sub = ex.submersion
    if sub is not None and sub.base_structure is not None:
        from .submersion import base_point

        bpts = [base_point(sub, p) for p in pts]
        checks += [I.gray_check(sub.base, sub.base_structure, k, bpts, tol=tol) for k in ("K1", "K2", "K3")]
    per = np.max([[c.residual_max for c in checks]], axis=0)
    rmax = float(np.max(per))
    return I.IdentityCheck(
        "gray_flat", rmax, float(np.mean([c.residual_mean for c in checks])), len(pts), tol,
        rmax <= tol, {c.name: c.residual_max for c in checks},
    )


def _codiff_indep(ex, pts, tol):
    return I.codiff_frame_independence_check(ex.structure, pts, sub=ex.submersion, tol=tol)


_S = frozenset({"submersion"})
_CC = frozenset({"contact_complex"})
_C = frozenset({"contact"})
_K = frozenset({"almost_cosymplectic_kl"})


_DATA_TAGS = frozenset({"submersion", "contact", "contact_complex", "warped"})


def _spec(name, tags, runner, description):
    tags = frozenset(tags)
    return CheckSpec(name, tags & _DATA_TAGS, tags - _DATA_TAGS, runner, description)


CHECKS: dict = {
    c.name: c
    for c in [
        # numerical substrate
        _spec("ad_vs_fd", (), lambda ex, pts, tol: I.ad_vs_fd_check(ex.patch, pts, tol=max(tol, 1e-6)),
              "AD metric derivatives vs central differences (relative)"),
        _spec("torsion_free", (), _with_structure(I.torsion_free_check), "torsion of the Levi-Civita connection"),
        _spec("metric_compatibility", (), _with_structure(I.metric_compatibility_check), "nabla g = 0"),
        _spec("riemann_symmetries", (), _patch(I.riemann_symmetries_check), "curvature symmetries and Bianchi"),
        # structures
        _spec("structure_axioms", _C, _st(I.structure_axioms_check), "almost contact metric axioms"),
        _spec("fundamental_form", _C, _st(I.fundamental_form_check), "Phi antisymmetric, Phi(xi, .) = 0"),
        _spec("codiff_frame_independence", _C, _codiff_indep, "delta Phi on two adapted frames"),
        _spec("sasakian", _C | {"sasakian"}, _st(I.sasakian_check), "Sasakian identity for nabla phi"),
        _spec("sasakian_codiff", _C | {"sasakian"}, _st(I.sasakian_codiff_check), "delta Phi = 2n eta"),
        _spec("almost_cosymplectic", _K, _st(I.almost_cosymplectic_check), "d Phi = d eta = 0"),
        _spec("a_star_identities", _K, _st(I.a_star_check), "A* symmetric, A* phi = -phi A*, nabla phi via A*"),
        _spec("n2_n4", _K, _st(I.n2_n4_check), "N2 = N4 = 0"),
        _spec("n3_cosymplectic", _K, _st(I.n3_cosymplectic_check), "N3 = 0 iff cosymplectic"),
        _spec("harmonicity", _K, _st(I.harmonicity_check), "Phi closed and coclosed"),
        _spec("gray_flat", _C | {"flat"}, _gray_total, "all Gray-type conditions on flat structures"),
        # submersions
        _spec("submersion_residuals", _S, _sub(I.submersion_residuals_check),
              "vertical frame in Ker d pi, Riemannian, holomorphic"),
        _spec("oneill_symmetries", _S, _sub(I.oneill_symmetry_check), "T symmetric, A skew, A = v[X,Y]/2"),
        _spec("basic_connection", _S, _sub(I.basic_connection_check), "h nabla_X Y is pi-related to nabla'"),
        _spec("curvature_vertical", _S, lambda ex, pts, tol: I.curvature_submersion_check(
            ex.submersion, pts, "vertical", tol=tol), "fibre curvature equation"),
        _spec("curvature_horizontal", _S, lambda ex, pts, tol: I.curvature_submersion_check(
            ex.submersion, pts, "horizontal", tol=tol), "horizontal curvature equation"),
        _spec("horizontal_integrability", _S | {"integrable_h"}, _sub(I.horizontal_integrability_check),
              "v[X, Y] = 0 for basic X, Y"),
        _spec("warped_T", _S | {"warped"}, _sub(I.warped_T_check), "T_U V = -(1/2f) g(U,V) grad f"),
        _spec("totally_umbilical", _S | {"umbilical"}, _sub(I.totally_umbilical_check), "T_U V = g(U,V) H / k"),
        _spec("pullback_omega", _CC, _sub(I.pullback_omega_check), "pi* Omega = Phi"),
        _spec("b_vertical_zero", _CC, _sub(I.b_vertical_zero_check), "B(V, .) = 0"),
        _spec("b_symmetry", _CC, _sub(I.b_symmetry_check), "B symmetric on H"),
        _spec("b_j_invariance", _CC, _sub(I.b_j_invariance_check), "B(phi X, phi Y) = B(X, Y)"),
        _spec("b_formula", _CC, _sub(I.b_formula_check), "B(X, Y) = A_X phi Y - A_{phi X} Y"),
        _spec("b_value_type", _CC, _sub(I.b_value_type_check), "B(H, H) vertical, B(H, V) horizontal"),
        _spec("b_phi_xi", _CC, _sub(I.b_phi_xi_check), "B(phi X, xi) = h nabla_X xi"),
        _spec("b_inner_product", _CC, _sub(I.b_inner_product_check), "inner-product formula for B"),
        _spec("structure_equation", _CC, _sub(I.structure_equation_check), "codifferential structure equation"),
        _spec("codif3", _CC, _sub(I.codif3_check), "horizontal part of the structure equation"),
        _spec("codif4", _CC, _sub(I.codif4_check), "vertical part of the structure equation"),
        _spec("fibre_codiff_intrinsic", _CC, _sub(I.fibre_codiff_intrinsic_check),
              "fibre codifferential: Gauss formula vs intrinsic chart"),
        _spec("k1_transfer", _CC, _sub(I.k1_transfer_check), "K1phi on M transfers to fibres / base"),
        _spec("integrability_transfer", _CC, _sub(I.integrability_transfer_check),
              "K1phi, K1 and B(X,X) = 0 force integrable H"),
        _spec("k2_transfer", _CC, _sub(I.k2_transfer_check), "K2phi on M with phi-bilinear A gives K2 on N"),
        _spec("k3_transfer", _CC, _sub(I.k3_transfer_check), "K3phi on M with A_X phi Y = A_phiX Y gives K3"),
        _spec("kahler_base", _CC | _K, _sub(I.kahler_base_criterion_check), "base Kaehler iff A_X xi = 0"),
    ]
}


def applicable_checks(ex: Example) -> list:
    return [name for name, c in CHECKS.items() if c.tags <= ex.tags]


@dataclass(frozen=True)
class RunConfig:
    example: str
    checks: tuple = ("all",)
    points: int = 100
    seed: int = DEFAULT_SEED
    tol: float = I.DEFAULT_TOL
    format: str = "text"

    def validate(self) -> tuple:
        """Resolve check names; raises ConfigError subclasses before any computation."""
        if self.example not in EXAMPLES:
            raise UnknownExample(f"unknown example {self.example!r}")
        if self.points < 1:
            raise ConfigError("points must be positive")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        tags = EXAMPLES[self.example].tags
        if tuple(self.checks) == ("all",):
            return tuple(n for n, c in CHECKS.items() if c.tags <= tags)
        for name in self.checks:
            if name not in CHECKS:
                raise UnknownCheck(f"unknown check {name!r}")
            missing = CHECKS[name].needs - tags
            if missing:
                raise ConfigError(
                    f"check {name!r} cannot run on {self.example!r} (missing {sorted(missing)})"
                )
        return tuple(self.checks)


@dataclass(frozen=True)
class Report:
    config: RunConfig
    checks: tuple
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "example": cfg.example,
                "checks": list(cfg.checks),
                "points": cfg.points,
                "seed": cfg.seed,
                "tol": cfg.tol,
            },
            "conventions": dict(self.conventions),
            "checks": [
                {
                    "name": c.name,
                    "residual_max": c.residual_max,
                    "residual_mean": c.residual_mean,
                    "points": c.points_used,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "details": {k: float(v) for k, v in c.details.items()},
                    "notes": list(c.notes),
                }
                for c in self.checks
            ],
            "passed": self.passed,
        }


def run(config: RunConfig) -> Report:
    names = config.validate()
    ex = example(config.example)
    pts = sample_points(ex.patch.lower, ex.patch.upper, config.points, config.seed)
    results = []
    for name in names:
        try:
            out = CHECKS[name].runner(ex, pts, config.tol)
        except PreconditionNotMet as exc:
            raise ConfigError(f"check {name!r} refused: {exc}") from exc
        if out.name != name:
            out = I.IdentityCheck(name, out.residual_max, out.residual_mean, out.points_used,
                                  out.tolerance, out.passed, out.details, out.notes)
        results.append(out)
    return Report(config, tuple(results))


def emit(report: Report, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2) + "\n").encode()
    rows = [(c.name, f"{c.residual_max:.3e}", f"{c.residual_mean:.3e}", f"{c.tolerance:.1e}",
             "PASS" if c.passed else "FAIL") for c in report.checks]
    head = ("check", "max", "mean", "tol", "result")
    widths = [max(len(r[i]) for r in rows + [head]) for i in range(5)]
    fmt_row = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()  # noqa: E731
    cfg = report.config
    lines = [f"example {cfg.example}  points {cfg.points}  seed {cfg.seed}", fmt_row(head)]
    lines += [fmt_row(r) for r in rows]
    lines.append(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return ("\n".join(lines) + "\n").encode()
