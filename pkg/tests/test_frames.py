from __future__ import annotations

import math

import numpy as np
import pytest

from contactsub.catalog import example
from contactsub.chart import eval_metric
from contactsub.errors import DegenerateInput, OddDimensionMismatch
from contactsub.frames import complement_basis, phi_adapted_frame
from contactsub.structures import structure_frame


def test_flat_cosymplectic_frame():
    st = example("olszak_constant").structure
    f = phi_adapted_frame(st.patch, st, [0, 0, 0], [[0, 0, 1]], [[1, 0, 0], [0, 1, 0]])
    assert f.tags == ("X", "phiX", "xi")
    np.testing.assert_allclose(f.vectors, np.eye(3), atol=1e-15)


def test_hopf_frame_pairings(hopf):
    st = hopf.structure
    p = np.array([math.pi / 4, 0.0, 0.0])
    f = structure_frame(st, p)
    g = eval_metric(hopf.total, p)
    ortho, pair = f.residuals(g, st.endo_at(p))
    assert ortho <= 1e-12 and pair <= 1e-12
    np.testing.assert_allclose(f.vectors[-1], [0.0, 1.0, 1.0])
    assert len(f.horizontal) == 2 and len(f.vertical) == 1


def test_repeated_vector_is_degenerate(hopf):
    st = hopf.structure
    p = hopf.total.center
    with pytest.raises(DegenerateInput):
        phi_adapted_frame(st.patch, st, p, [[0, 1, 1]], [[1, 0, 0], [1, 0, 0]])


def test_odd_dimension_mismatch(hopf):
    st = hopf.structure
    with pytest.raises(OddDimensionMismatch):
        phi_adapted_frame(st.patch, st, hopf.total.center, [[0, 1, 1], [1, 0, 0]], [[0, 1, 0]])


def test_complement_basis_is_orthogonal(hopf):
    p = hopf.total.center
    g = eval_metric(hopf.total, p)
    comp = complement_basis(g, [[0.0, 1.0, 1.0]])
    assert len(comp) == 2
    for v in comp:
        assert abs(v @ g @ np.array([0.0, 1.0, 1.0])) < 1e-12
