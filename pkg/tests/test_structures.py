from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contactsub.catalog import EXAMPLES, example
from contactsub.chart import eval_metric
from contactsub.sampling import sample_points
from contactsub.structures import (
    a_star,
    check_a_star_identities,
    classify,
    fundamental_form,
    harmonicity_residual,
    n_tensors,
    structure_frame,
)

coord = st.floats(-0.9, 0.9)


@pytest.fixture(scope="module")
def flat():
    return example("olszak_constant").structure


def _pts(structure, n=8):
    return sample_points(structure.patch.lower, structure.patch.upper, n, seed=5)


@pytest.mark.parametrize("name", [n for n, s in EXAMPLES.items() if "contact" in s.tags])
def test_catalog_structures_satisfy_axioms(name):
    st_ = example(name).structure
    for p in _pts(st_, 10):
        assert max(st_.axiom_residuals(p).values()) <= 1e-12


def test_fundamental_form_values(flat, hopf):
    assert fundamental_form(flat, [0, 0, 0], [1, 0, 0], [0, 1, 0]) == pytest.approx(-1.0)
    p = hopf.total.center
    for X in np.eye(3):
        assert fundamental_form(hopf.structure, p, X, X) == pytest.approx(0.0, abs=1e-15)


def test_classify_flat(flat):
    c = classify(flat, _pts(flat))
    assert c["cosymplectic_residual"] == 0.0
    assert c["almost_cosymplectic_residual"] == 0.0
    assert c["sasakian_residual"] > 0.5


def test_classify_sasakian(hopf):
    c = classify(hopf.structure, _pts(hopf.structure))
    assert c["sasakian_residual"] <= 1e-8
    assert c["almost_cosymplectic_residual"] > 0.5  # d eta != 0


def test_classify_olszak(olszak):
    c = classify(olszak, _pts(olszak))
    assert c["almost_cosymplectic_residual"] <= 1e-9
    assert c["cosymplectic_residual"] >= 0.1


@given(coord, coord, coord)
def test_olszak_a_star_closed_form(x, y, z):
    p = np.array([x, y, z])
    st_ = example("olszak_exp").structure
    np.testing.assert_allclose(a_star(st_, p, [1, 0, 0]), [-1.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(a_star(st_, p, [0, 1, 0]), [0.0, 1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(a_star(st_, p, [0, 0, 1]), 0.0, atol=1e-12)
    f = math.exp(2 * z)
    n3 = n_tensors(st_, p, [1, 0, 0], [1, 0, 0])["N3"]
    np.testing.assert_allclose(n3, [0.0, 2 * f, 0.0], rtol=1e-12, atol=1e-12)


def test_a_star_identities(olszak, flat, hopf):
    assert max(check_a_star_identities(olszak, _pts(olszak)).values()) <= 1e-8
    assert max(check_a_star_identities(flat, _pts(flat)).values()) == 0.0
    p = hopf.total.center
    e = check_a_star_identities(hopf.structure, [p])
    g = eval_metric(hopf.total, p)
    phi = hopf.structure.endo_at(p)
    X = np.array([1.0, 0.0, 0.0])
    expect = math.sqrt((2 * phi @ phi @ X) @ g @ (2 * phi @ phi @ X))
    assert e["e2"] >= expect - 1e-12 and expect == pytest.approx(2.0)


def test_normality_tensors(flat, hopf):
    for X in np.eye(3):
        for Y in np.eye(3):
            t = n_tensors(flat, [0.1, 0.2, 0.3], X, Y)
            assert not t["N1"].any() and t["N2"] == 0.0 and not t["N3"].any() and t["N4"] == 0.0
    p = hopf.total.center
    for X in np.eye(3):
        for Y in np.eye(3):
            assert np.abs(n_tensors(hopf.structure, p, X, Y)["N1"]).max() < 1e-12


def test_harmonicity(olszak, flat, hopf):
    assert max(harmonicity_residual(olszak, _pts(olszak)).values()) <= 1e-8
    assert max(harmonicity_residual(flat, _pts(flat)).values()) == 0.0
    h = harmonicity_residual(hopf.structure, _pts(hopf.structure, 3))
    assert h["deltaPhi_max"] == pytest.approx(2.0)


def test_structure_frame_tags(olszak):
    f = structure_frame(olszak, [0.3, 0.3, 0.3])
    assert f.tags == ("X", "phiX", "xi")
