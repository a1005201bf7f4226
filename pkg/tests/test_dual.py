from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contactsub import dual
from contactsub.dual import D2Scalar, Jet, d2_eval, jet_of
from contactsub.errors import DerivativeUnavailable

finite = st.floats(-2.0, 2.0, allow_nan=False)


def test_product_value_grad_hess():
    val, grad, hess = d2_eval(lambda x: x[0] * x[1], [2.0, 3.0])
    assert val == 6.0
    np.testing.assert_allclose(grad, [3.0, 2.0])
    np.testing.assert_allclose(hess, [[0.0, 1.0], [1.0, 0.0]])


def test_constant_field_has_zero_derivatives():
    val, grad, hess = d2_eval(lambda x: np.array([5.0, -1.0]), [0.3, 0.4])
    np.testing.assert_allclose(val, [5.0, -1.0])
    assert not grad.any() and not hess.any()


def test_cos_squared_derivative_at_quarter_pi():
    _, grad, hess = d2_eval(lambda x: dual.cos(x[0]) ** 2, [math.pi / 4])
    assert grad[0] == pytest.approx(-1.0, abs=1e-15)
    assert hess[0, 0] == pytest.approx(-2.0 * math.cos(math.pi / 2), abs=1e-15)


def test_quotient_and_power_rules():
    f = lambda x: (x[0] ** 3) / (1.0 + x[1] * x[1])  # noqa: E731
    x0, y0 = 1.3, -0.7
    val, grad, hess = d2_eval(f, [x0, y0])
    d = 1.0 + y0 * y0
    assert val == pytest.approx(x0**3 / d)
    np.testing.assert_allclose(grad, [3 * x0**2 / d, -2 * y0 * x0**3 / d**2])
    assert hess[0, 1] == pytest.approx(-6 * x0**2 * y0 / d**2)
    assert hess[0, 0] == pytest.approx(6 * x0 / d)


def test_first_order_mode_refuses_hessian():
    x = dual.seed([1.0, 2.0], order=1)
    y = x[0] * x[1]
    assert y.hess is None
    with pytest.raises(DerivativeUnavailable):
        dual._extract(np.array([y], dtype=object), 2, 2)


def test_division_by_zero_value():
    x = dual.seed([0.0])[0]
    with pytest.raises(ZeroDivisionError):
        1.0 / x


def test_jet_product_rule():
    A = lambda x: np.array([[x[0], x[1]], [0.0, x[0] * x[1]]], dtype=object)  # noqa: E731
    v = lambda x: np.array([x[1], 1.0], dtype=object)  # noqa: E731
    p = np.array([0.5, 2.0])
    prod = jet_of(A, p) @ jet_of(v, p)
    direct = jet_of(lambda x: A(x) @ v(x), p)
    np.testing.assert_allclose(prod.val, direct.val)
    np.testing.assert_allclose(prod.d, direct.d)


def test_jet_constant():
    j = Jet.constant([1.0, 2.0], 3)
    assert j.d.shape == (2, 3) and not j.d.any()


@given(finite, finite)
def test_elementary_functions_match_numpy(a, b):
    f = lambda x: dual.sin(x[0]) * dual.exp(x[1]) + dual.cos(x[0] * x[1])  # noqa: E731
    val, grad, _ = d2_eval(f, [a, b])
    assert val == pytest.approx(math.sin(a) * math.exp(b) + math.cos(a * b), rel=1e-12, abs=1e-12)
    gx = math.cos(a) * math.exp(b) - b * math.sin(a * b)
    gy = math.sin(a) * math.exp(b) - a * math.sin(a * b)
    np.testing.assert_allclose(grad, [gx, gy], rtol=1e-12, atol=1e-12)


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0))
def test_hessian_symmetric_and_matches_fd(a, b):
    f = lambda x: dual.log(x[0]) * dual.sqrt(x[1]) + dual.tan(0.2 * x[0] * x[1])  # noqa: E731
    _, grad, hess = d2_eval(f, [a, b])
    np.testing.assert_allclose(hess, hess.T, atol=1e-14)
    h = 1e-5
    for k in range(2):
        e = np.eye(2)[k] * h
        gp = d2_eval(f, np.array([a, b]) + e, order=1)[1]
        gm = d2_eval(f, np.array([a, b]) - e, order=1)[1]
        np.testing.assert_allclose(hess[:, k], (gp - gm) / (2 * h), rtol=1e-6, atol=1e-6)


def test_d2scalar_refuses_numpy_ufuncs():
    x = D2Scalar(1.0, np.zeros(1), np.zeros((1, 1)))
    out = np.array([1.0, 2.0]) * x
    assert out.dtype == object and out[1].value == 2.0
