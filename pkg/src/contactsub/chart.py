"""Coordinate patches, tensor fields and pointwise metric evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dual
from .errors import OutOfDomain
from .linalg import cholesky

__all__ = [
    "ChartPatch",
    "Field",
    "ScalarField",
    "VectorField",
    "OneFormField",
    "TwoFormField",
    "EndoField",
    "as_vector_field",
    "eval_metric",
    "inner",
    "d2_eval",
    "check_domain",
]

_DOMAIN_SLACK = 1e-12
_MEMO_LIMIT = 2048


@dataclass(frozen=True, eq=False)
class ChartPatch:
    """A box of chart coordinates carrying a metric.

    ``metric_fn`` maps a coordinate array (floats or D2Scalars) to the
    symmetric ``dim x dim`` metric matrix.
    """

    dim: int
    lower: tuple
    upper: tuple
    metric_fn: Callable
    name: str = "patch"
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def metric(self, x) -> np.ndarray:
        return np.asarray(self.metric_fn(x))

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            return False
        lo, hi = self._box()
        return bool((p >= lo).all() and (p <= hi).all())

    def _box(self):
        box = self._memo.get("box")
        if box is None:
            box = self._memo["box"] = (
                np.asarray(self.lower, float) - _DOMAIN_SLACK,
                np.asarray(self.upper, float) + _DOMAIN_SLACK,
            )
        return box

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower, float) + np.asarray(self.upper, float))

    def memo(self, key, build: Callable):
        """Per-patch cache for pointwise quantities (patches are immutable)."""
        try:
            return self._memo[key]
        except KeyError:
            pass
        if len(self._memo) > _MEMO_LIMIT:
            self._memo.clear()
        out = self._memo[key] = build()
        return out


def check_domain(patch: ChartPatch, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not patch.contains(p):
        raise OutOfDomain(f"{p.tolist()} outside {patch.name} box")
    return p


@dataclass(frozen=True)
class Field:
    """A tensor field given by a pure function of the coordinates."""

    fn: Callable
    kind = "field"

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(x))


class ScalarField(Field):
    kind = "scalar"


class VectorField(Field):
    kind = "vector"

    @classmethod
    def constant(cls, v) -> "VectorField":
        v = np.array(v, dtype=float)
        return cls(lambda x: v)


class OneFormField(Field):
    kind = "one_form"


class TwoFormField(Field):
    kind = "two_form"


class EndoField(Field):
    kind = "endo"


def as_vector_field(X) -> VectorField:
    """Fields pass through; arrays become constant-component fields."""
    if isinstance(X, Field) or callable(X):
        return X if isinstance(X, Field) else VectorField(X)
    return VectorField.constant(X)


def eval_metric(patch: ChartPatch, p) -> np.ndarray:
    """Metric matrix at ``p``; raises OutOfDomain / NotSPD."""
    p = check_domain(patch, p)
    g = np.asarray(patch.metric(p), dtype=float)
    g = 0.5 * (g + g.T)
    cholesky(g)
    return g


def inner(patch: ChartPatch, p, X, Y) -> float:
    g = eval_metric(patch, p)
    return float(np.asarray(X, float) @ g @ np.asarray(Y, float))


def d2_eval(field: Callable, p, patch: ChartPatch | None = None, order: int = 2):
    """Value, gradient and Hessian of a field at ``p`` (domain-checked if a patch is given)."""
    if patch is not None:
        p = check_domain(patch, p)
    return dual.d2_eval(field, p, order=order)
