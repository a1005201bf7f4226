from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contactsub.catalog import example
from contactsub.chart import ChartPatch, VectorField, eval_metric
from contactsub.connection import (
    christoffel,
    codiff_2form,
    cov_deriv_phi,
    cov_deriv_vec,
    ext_deriv_1form,
    ext_deriv_2form,
    lie_bracket,
    riemann4,
    riemann_tensor,
)
from contactsub.errors import FrameMismatch, OutOfDomain
from contactsub.structures import fundamental_form_field, structure_frame

from oracles import constant_curvature_R, fd_christoffel, gram_schmidt_np, hopf_frame, warped_gauss_curvature

FLAT3 = ChartPatch(3, (-1.0,) * 3, (1.0,) * 3, lambda x: np.eye(3), name="flat")


def test_flat_christoffel_and_curvature_vanish():
    c = christoffel(FLAT3, [0.2, 0.1, 0.0])
    assert not c.gamma.any()
    assert not riemann_tensor(FLAT3, [0.2, 0.1, 0.0]).any()
    np.testing.assert_array_equal(cov_deriv_vec(FLAT3, [1, 2, 3], [0.5, 0, 1], [0, 0, 0]), 0.0)


def test_warped_christoffel_values(warped):
    G = christoffel(warped.total, [1.0, 0.0]).gamma
    assert G[0, 1, 1] == pytest.approx(-1.0)
    assert G[1, 0, 1] == pytest.approx(0.5)
    np.testing.assert_allclose(cov_deriv_vec(warped.total, [0, 1], [0, 1], [1.0, 0.0]), [-1.0, 0.0])


def test_hopf_christoffel_value(hopf):
    G = christoffel(hopf.total, [math.pi / 4, 0.0, 0.0]).gamma
    assert G[0, 1, 1] == pytest.approx(0.5)


@pytest.mark.parametrize("name", ["hopf_s3", "warped_exponential", "olszak_exp", "product_round_s2"])
def test_christoffel_matches_finite_differences(name):
    ex = example(name)
    p = ex.patch.center
    fd = fd_christoffel(lambda x: np.asarray(ex.patch.metric(x), float), p)
    np.testing.assert_allclose(christoffel(ex.patch, p).gamma, fd, atol=1e-8)


def test_reeb_field_is_geodesic(hopf):
    p = hopf.total.center
    np.testing.assert_allclose(cov_deriv_vec(hopf.total, [0, 1, 1], [0, 1, 1], p), 0.0, atol=1e-14)


def test_lie_brackets():
    p = np.array([0.3, -0.2])
    assert not lie_bracket([1.0, 0.0], [0.0, 1.0], p).any()
    X = VectorField(lambda x: np.array([0.0, x[0]], dtype=object))
    np.testing.assert_allclose(lie_bracket(X, [1.0, 0.0], p), [0.0, -1.0])


def test_round_sphere_sectional_curvature(hopf):
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = rng.uniform(hopf.total.lower, hopf.total.upper)
        g = eval_metric(hopf.total, p)
        np.testing.assert_allclose(riemann_tensor(hopf.total, p), constant_curvature_R(g, 1.0), atol=1e-12)
        X, Y, _ = gram_schmidt_np(rng.normal(size=(3, 3)), g)
        assert riemann4(hopf.total, p, X, Y, Y, X) == pytest.approx(1.0, abs=1e-12)


def test_warped_gauss_curvature(warped):
    g = eval_metric(warped.total, [1.0, 0.0])
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0 / np.sqrt(g[1, 1])])
    K = riemann4(warped.total, [1.0, 0.0], e1, e2, e2, e1)
    assert K == pytest.approx(warped_gauss_curvature(2.0, 2.0, 2.0))
    assert K == pytest.approx(-0.25)


@given(st.floats(-1.4, 1.4))
def test_warped_exponential_curvature(x):
    sub = example("warped_exponential").submersion
    f = math.exp(x)
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0 / math.sqrt(f)])
    K = riemann4(sub.total, [x, 0.0], e1, e2, e2, e1)
    assert K == pytest.approx(warped_gauss_curvature(f, f, f), abs=1e-12)


def test_hopf_d_eta(hopf):
    eta = hopf.structure.eta
    assert ext_deriv_1form(eta, [math.pi / 4, 0, 0], [1, 0, 0], [0, 1, 0]) == pytest.approx(-1.0)
    flat = example("olszak_constant").structure
    assert ext_deriv_1form(flat.eta, [0.1, 0.2, 0.3], [1, 0, 0], [0, 0, 1]) == 0.0


def test_olszak_d_phi_vanishes(olszak):
    Phi = fundamental_form_field(olszak)
    for p in ([0.0, 0.0, 0.0], [0.5, -0.3, 0.8]):
        for X, Y, Z in ([np.eye(3)[0], np.eye(3)[1], np.eye(3)[2]],):
            assert abs(ext_deriv_2form(Phi, p, X, Y, Z)) < 1e-14


def test_cov_deriv_phi_sasakian_and_flat(hopf):
    flat = example("olszak_constant").structure
    assert not cov_deriv_phi(flat.patch, flat, [0, 0, 0], [1, 0, 0], [0, 1, 0]).any()
    st_ = hopf.structure
    p = np.array([0.7, 0.1, -0.2])
    g = eval_metric(hopf.total, p)
    xi, eta = st_.xi_at(p), st_.eta_at(p)
    for X in hopf_frame(p):
        for Y in hopf_frame(p):
            lhs = cov_deriv_phi(hopf.total, st_, p, X, Y)
            np.testing.assert_allclose(lhs, (X @ g @ Y) * xi - (eta @ Y) * X, atol=1e-12)


def test_codifferential_values(hopf, olszak):
    p = np.array([0.7, 0.1, -0.2])
    frame = structure_frame(hopf.structure, p)
    assert codiff_2form(hopf.total, hopf.structure, p, frame, [0, 1, 1]) == pytest.approx(2.0)
    X1, phiX1, _ = hopf_frame(p)
    assert abs(codiff_2form(hopf.total, hopf.structure, p, frame, X1)) < 1e-12
    q = np.array([0.2, 0.4, -0.6])
    fo = structure_frame(olszak, q)
    for X in np.eye(3):
        assert abs(codiff_2form(olszak.patch, olszak, q, fo, X)) < 1e-12
    with pytest.raises(FrameMismatch):
        codiff_2form(hopf.total, hopf.structure, hopf.total.center, frame, X1)


def test_out_of_domain(hopf):
    with pytest.raises(OutOfDomain):
        christoffel(hopf.total, [3.0, 0.0, 0.0])
