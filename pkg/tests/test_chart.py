from __future__ import annotations

import math

import numpy as np
import pytest

from contactsub.chart import ChartPatch, d2_eval, eval_metric, inner
from contactsub.errors import NotSPD, OutOfDomain

from oracles import hopf_metric_pullback

FLAT3 = ChartPatch(3, (-1.0,) * 3, (1.0,) * 3, lambda x: np.eye(3), name="flat")


def test_flat_metric_and_inner():
    np.testing.assert_array_equal(eval_metric(FLAT3, [0.1, 0.2, 0.3]), np.eye(3))
    assert inner(FLAT3, [0, 0, 0], [1, 0, 0], [0, 1, 0]) == 0.0


def test_hopf_metric_is_embedding_pullback(hopf):
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.uniform(hopf.total.lower, hopf.total.upper)
        np.testing.assert_allclose(eval_metric(hopf.total, p), hopf_metric_pullback(p), atol=1e-14)
    assert inner(hopf.total, [math.pi / 4, 0, 0], [0, 1, 0], [0, 1, 0]) == pytest.approx(0.5)


def test_warped_metric_values(warped):
    np.testing.assert_allclose(eval_metric(warped.total, [1.0, 0.0]), np.diag([1.0, 2.0]))
    assert inner(warped.total, [1.0, 0.0], [0, 1], [0, 1]) == pytest.approx(2.0)


def test_out_of_domain_and_not_spd(hopf):
    with pytest.raises(OutOfDomain):
        eval_metric(hopf.total, [0.0, 0.0, 0.0])
    bad = ChartPatch(2, (-1, -1), (1, 1), lambda x: np.diag([1.0, -1.0]))
    with pytest.raises(NotSPD):
        eval_metric(bad, [0.0, 0.0])


def test_metric_derivative_on_hopf(hopf):
    _, grad, _ = d2_eval(hopf.total.metric, [math.pi / 4, 0.0, 0.0], hopf.total)
    assert grad[1, 1, 0] == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(OutOfDomain):
        d2_eval(hopf.total.metric, [2.0, 0.0, 0.0], hopf.total)
