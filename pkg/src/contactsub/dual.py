"""Second-order forward-mode automatic differentiation.

A :class:`D2Scalar` carries a value together with its gradient and Hessian
with respect to a fixed set of active variables.  Arithmetic propagates both
exactly by the chain rule, so derivatives have no truncation error.

Scalars may also run in first-order mode (``hess is None``); any expression
touching such a scalar is first-order only, and asking for its Hessian raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DerivativeUnavailable

__all__ = [
    "D2Scalar",
    "Jet",
    "d2_eval",
    "seed",
    "value_of",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
]


def _obj0(x):
    a = np.empty((), dtype=object)
    a[()] = x
    return a


class D2Scalar:
    """Value, gradient and (optionally) Hessian of a scalar expression."""

    __slots__ = ("value", "grad", "hess")
    # keep numpy from swallowing mixed scalar/array arithmetic
    __array_ufunc__ = None

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray | None):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    # -- construction helpers -------------------------------------------------
    def _lift(self, other) -> "D2Scalar":
        n = self.grad.shape[0]
        return D2Scalar(
            other, np.zeros(n), None if self.hess is None else np.zeros((n, n))
        )

    def _unary(self, f0: float, f1: float, f2: float) -> "D2Scalar":
        g = self.grad
        h = None
        if self.hess is not None:
            h = f1 * self.hess + f2 * np.outer(g, g)
        return D2Scalar(f0, f1 * g, h)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, D2Scalar):
            h = None
            if self.hess is not None and other.hess is not None:
                h = self.hess + other.hess
            return D2Scalar(self.value + other.value, self.grad + other.grad, h)
        if isinstance(other, np.ndarray):
            return np.asarray(other, dtype=object) + _obj0(self)
        return D2Scalar(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return D2Scalar(-self.value, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return _obj0(self) - np.asarray(other, dtype=object)
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, np.ndarray):
            return np.asarray(other, dtype=object) - _obj0(self)
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, D2Scalar):
            a, b = self, other
            h = None
            if a.hess is not None and b.hess is not None:
                cross = np.outer(a.grad, b.grad)
                h = a.value * b.hess + b.value * a.hess + cross + cross.T
            return D2Scalar(a.value * b.value, a.value * b.grad + b.value * a.grad, h)
        if isinstance(other, np.ndarray):
            return np.asarray(other, dtype=object) * _obj0(self)
        other = float(other)
        return D2Scalar(
            self.value * other,
            self.grad * other,
            None if self.hess is None else self.hess * other,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "D2Scalar":
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError("D2Scalar division by zero value")
        return self._unary(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, D2Scalar):
            return self * other.reciprocal()
        if isinstance(other, np.ndarray):
            return _obj0(self) / np.asarray(other, dtype=object)
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        if isinstance(other, np.ndarray):
            return np.asarray(other, dtype=object) / _obj0(self)
        return self.reciprocal() * other

    def __pow__(self, k):
        if isinstance(k, D2Scalar):
            return exp(k * log(self))
        if k == 2:
            return self * self
        if k == 1:
            return self
        if k == 0:
            return self._lift(1.0)
        v = self.value
        if float(k).is_integer() and k < 0 and v == 0.0:
            raise ZeroDivisionError("negative power of zero")
        return self._unary(v**k, k * v ** (k - 1), k * (k - 1) * v ** (k - 2))

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def __abs__(self):
        return -self if self.value < 0 else self

    # -- comparisons act on the value -----------------------------------------
    def __lt__(self, other):
        return self.value < value_of(other)

    def __le__(self, other):
        return self.value <= value_of(other)

    def __gt__(self, other):
        return self.value > value_of(other)

    def __ge__(self, other):
        return self.value >= value_of(other)

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"D2Scalar({self.value!r}, grad={self.grad!r})"


def value_of(x) -> float:
    return x.value if isinstance(x, D2Scalar) else float(x)


def _elementwise(fn: Callable, npfn: Callable):
    vec = np.frompyfunc(fn, 1, 1)

    def wrapped(x):
        if isinstance(x, D2Scalar):
            return fn(x)
        if isinstance(x, np.ndarray) and x.dtype == object:
            return vec(x)
        return npfn(x)

    wrapped.__name__ = npfn.__name__
    return wrapped


def _sin(x: D2Scalar) -> D2Scalar:
    s, c = math.sin(x.value), math.cos(x.value)
    return x._unary(s, c, -s)


def _cos(x: D2Scalar) -> D2Scalar:
    s, c = math.sin(x.value), math.cos(x.value)
    return x._unary(c, -s, -c)


def _tan(x: D2Scalar) -> D2Scalar:
    t = math.tan(x.value)
    sec2 = 1.0 + t * t
    return x._unary(t, sec2, 2.0 * t * sec2)


def _exp(x: D2Scalar) -> D2Scalar:
    e = math.exp(x.value)
    return x._unary(e, e, e)


def _log(x: D2Scalar) -> D2Scalar:
    v = x.value
    return x._unary(math.log(v), 1.0 / v, -1.0 / v**2)


def _sqrt(x: D2Scalar) -> D2Scalar:
    r = math.sqrt(x.value)
    return x._unary(r, 0.5 / r, -0.25 / (r * x.value))


sin = _elementwise(_sin, np.sin)
cos = _elementwise(_cos, np.cos)
tan = _elementwise(_tan, np.tan)
exp = _elementwise(_exp, np.exp)
log = _elementwise(_log, np.log)
sqrt = _elementwise(_sqrt, np.sqrt)


def seed(p, order: int = 2) -> np.ndarray:
    """Active variables at ``p``: object array of D2Scalars with unit gradients."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    eye = np.eye(n)
    out = np.empty(n, dtype=object)
    for i in range(n):
        out[i] = D2Scalar(p[i], eye[i].copy(), np.zeros((n, n)) if order >= 2 else None)
    return out


@dataclass(frozen=True)
class Jet:
    """First-order jet of an array-valued quantity at a point.

    ``d[..., k]`` is the partial derivative along coordinate ``k``.
    """

    val: np.ndarray
    d: np.ndarray

    @classmethod
    def constant(cls, val, n: int) -> "Jet":
        val = np.asarray(val, dtype=float)
        return cls(val, np.zeros(val.shape + (n,)))

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.val + other.val, self.d + other.d)

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.val - other.val, self.d - other.d)

    def __neg__(self) -> "Jet":
        return Jet(-self.val, -self.d)

    def scale(self, c: float) -> "Jet":
        return Jet(c * self.val, c * self.d)

    def __matmul__(self, other: "Jet") -> "Jet":
        # matrix @ vector or matrix @ matrix, product rule on the trailing axis
        a, b = self, other
        val = a.val @ b.val
        if b.val.ndim == 1:
            d = np.einsum("ijk,j->ik", a.d, b.val) + np.einsum("ij,jk->ik", a.val, b.d)
        else:
            d = np.einsum("ijk,jl->ilk", a.d, b.val) + np.einsum("ij,jlk->ilk", a.val, b.d)
        return Jet(val, d)

    def directional(self, a) -> np.ndarray:
        """Derivative along the vector ``a``."""
        return self.d @ np.asarray(a, dtype=float)


def _extract(out: np.ndarray, n: int, order: int):
    shape = out.shape
    flat = out.reshape(-1)
    val = np.empty(flat.shape[0])
    grad = np.zeros((flat.shape[0], n))
    hess = np.zeros((flat.shape[0], n, n)) if order >= 2 else None
    for idx, entry in enumerate(flat):
        if isinstance(entry, D2Scalar):
            val[idx] = entry.value
            grad[idx] = entry.grad
            if hess is not None:
                if entry.hess is None:
                    raise DerivativeUnavailable(
                        "expression carries first-order derivatives only"
                    )
                hess[idx] = 0.5 * (entry.hess + entry.hess.T)
        else:
            val[idx] = float(entry)
    val = val.reshape(shape)
    grad = grad.reshape(shape + (n,))
    if hess is not None:
        hess = hess.reshape(shape + (n, n))
    return val, grad, hess


def d2_eval(field: Callable, p, order: int = 2):
    """Evaluate ``field`` at ``p`` with forward-mode derivatives.

    Returns ``(value, grad, hess)`` where ``grad`` and ``hess`` append one and
    two coordinate axes to the shape of the value.  ``hess`` is ``None`` when
    ``order == 1``.
    """
    x = seed(p, order)
    out = field(x)
    out = np.asarray(out, dtype=object)
    return _extract(out, x.shape[0], order)


def jet_of(field: Callable, p) -> Jet:
    val, grad, _ = d2_eval(field, p, order=1)
    return Jet(val, grad)
