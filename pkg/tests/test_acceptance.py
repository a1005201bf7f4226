"""Acceptance criteria, one test (and one reported line) per criterion."""

from __future__ import annotations

import subprocess
import sys

import numpy as np

from contactsub import identities as I
from contactsub.catalog import EXAMPLES, build_warped, example
from contactsub.chart import eval_metric
from contactsub.connection import codiff_2form, riemann4
from contactsub.sampling import sample_points
from contactsub.structures import n_tensors, structure_frame
from contactsub.submersion import oneill_A, oneill_T, submersion_frame, tensor_B, trace_B_h

from oracles import gram_schmidt_np, hopf_frame

N, SEED = 100, 42


def _pts(patch):
    return sample_points(patch.lower, patch.upper, N, SEED)


def _norm(g, v):
    return float(np.sqrt(v @ g @ v))


def test_criterion_1_structure_equation(criterion):
    hopf = example("hopf_s3").submersion
    pts = _pts(hopf.total)
    check = I.structure_equation_check(hopf, pts)
    dphi_xi, half_trace = [], []
    for p in pts:
        g = eval_metric(hopf.total, p)
        xi = hopf.structure.xi_at(p)
        dphi_xi.append(codiff_2form(hopf.total, hopf.structure, p, submersion_frame(hopf, p), xi))
        half_trace.append(0.5 * float(trace_B_h(hopf, p) @ g @ xi))
    e_dphi = float(np.max(np.abs(np.array(dphi_xi) - 2.0)))
    e_tr = float(np.max(np.abs(np.array(half_trace) - 2.0)))
    ok = check.residual_max <= 1e-7 and e_dphi <= 1e-7 and e_tr <= 1e-7
    criterion(1, ok, f"structure equation max {check.residual_max:.2e}; |dPhi(xi)-2| {e_dphi:.2e}; "
                     f"|g(TrB,xi)/2-2| {e_tr:.2e} over {check.points_used} points")
    assert check.points_used == N
    assert ok


def test_criterion_2_warped_product(criterion):
    sub = example("warped_quadratic").submersion
    T = oneill_T(sub, [1.0, 0.0], [0.0, 1.0], [0.0, 1.0])
    e_point = float(np.max(np.abs(T - np.array([-1.0, 0.0]))))
    check = I.warped_T_check(sub, _pts(sub.total), tol=1e-9)
    ok = e_point <= 1e-8 and check.passed
    criterion(2, ok, f"|T_dy dy + dx| {e_point:.2e}; warped_T max {check.residual_max:.2e}")
    assert ok


def test_criterion_3_oneill_symmetries(criterion):
    worst, names = 0.0, []
    for name, spec in EXAMPLES.items():
        if "submersion" not in spec.tags:
            continue
        sub = example(name).submersion
        worst = max(worst, I.oneill_symmetry_check(sub, _pts(sub.total), tol=1e-8).residual_max)
        names.append(name)
    hopf = example("hopf_s3").submersion
    e_a = 0.0
    for p in _pts(hopf.total):
        X, phiX, xi = hopf_frame(p)
        e_a = max(e_a, _norm(eval_metric(hopf.total, p), oneill_A(hopf, p, X, phiX) - xi))
    ok = worst <= 1e-8 and e_a <= 1e-7
    criterion(3, ok, f"O'Neill symmetries max {worst:.2e} on {len(names)} instances; "
                     f"|A_X phiX - xi| {e_a:.2e}")
    assert ok


def test_criterion_4_olszak(criterion):
    st = example("olszak_exp").structure
    pts = _pts(st.patch)
    acos = I.almost_cosymplectic_check(st, pts).residual_max
    e = I.a_star_check(st, pts).details
    n24 = I.n2_n4_check(st, pts)
    harm = I.harmonicity_check(st, pts)
    flat = example("olszak_constant").structure
    fpts = _pts(flat.patch)
    fe = I.a_star_check(flat, fpts).residual_max
    fn3 = max(
        _norm(eval_metric(flat.patch, p), n_tensors(flat, p, X, X)["N3"])
        for p in fpts for X in structure_frame(flat, p).vectors
    )
    ok = (
        acos <= 1e-8 and max(e.values()) <= 1e-8 and n24.residual_max <= 1e-8
        and n24.details["max_N3"] >= 1.0 and harm.details["deltaPhi_max"] <= 1e-8
        and fe <= 1e-10 and fn3 <= 1e-10
    )
    criterion(4, ok, f"dPhi,deta {acos:.2e}; e1-e3 {max(e.values()):.2e}; N2,N4 {n24.residual_max:.2e}; "
                     f"max|N3| {n24.details['max_N3']:.3f}; deltaPhi {harm.details['deltaPhi_max']:.2e}; "
                     f"f=1: A* {fe:.1e}, N3 {fn3:.1e}")
    assert ok


def test_criterion_5_b_tensor(criterion):
    worst = 0.0
    for name in ("hopf_s3", "product_flat_r2", "product_round_s2"):
        sub = example(name).submersion
        pts = _pts(sub.total)
        for fn in (I.b_vertical_zero_check, I.b_symmetry_check, I.b_j_invariance_check,
                   I.b_inner_product_check):
            worst = max(worst, fn(sub, pts, tol=1e-8).residual_max)
    hopf = example("hopf_s3").submersion
    e_phi = 0.0
    for p in _pts(hopf.total):
        X, phiX, xi = hopf_frame(p)
        e_phi = max(e_phi, _norm(eval_metric(hopf.total, p), tensor_B(hopf, p, phiX, xi) + phiX))
    ok = worst <= 1e-8 and e_phi <= 1e-7
    criterion(5, ok, f"B propositions max {worst:.2e}; |B(phiX,xi) + phiX| {e_phi:.2e}")
    assert ok


def test_criterion_6_curvature_equations(criterion):
    subs = [example(n).submersion for n in ("product_flat_r2", "product_round_s2", "warped_quadratic",
                                            "warped_exponential", "hopf_s3")]
    subs.append(build_warped("quadratic", fibre_dim=2))
    worst = 0.0
    for sub in subs:
        for which in ("vertical", "horizontal"):
            worst = max(worst, I.curvature_submersion_check(sub, _pts(sub.total), which).residual_max)
    hopf = example("hopf_s3").submersion
    rng = np.random.default_rng(SEED)
    e_sec = 0.0
    for p in _pts(hopf.total):
        X, Y, _ = gram_schmidt_np(rng.normal(size=(3, 3)), eval_metric(hopf.total, p))
        e_sec = max(e_sec, abs(riemann4(hopf.total, p, X, Y, Y, X) - 1.0))
    ok = worst <= 1e-7 and e_sec <= 1e-8
    criterion(6, ok, f"curvature equations max {worst:.2e} on {len(subs)} instances; "
                     f"|R(X,Y,Y,X) - 1| {e_sec:.2e}")
    assert ok


def test_criterion_7_numerical_substrate(criterion):
    fd = tor = comp = indep = 0.0
    for name in EXAMPLES:
        ex = example(name)
        pts = _pts(ex.patch)
        fd = max(fd, I.ad_vs_fd_check(ex.patch, pts, tol=1e-6).residual_max)
        tor = max(tor, I.torsion_free_check(ex.patch, pts, ex.structure).residual_max)
        comp = max(comp, I.metric_compatibility_check(ex.patch, pts, ex.structure).residual_max)
        if ex.structure is not None:
            indep = max(indep, I.codiff_frame_independence_check(
                ex.structure, pts, sub=ex.submersion).residual_max)
    ok = fd <= 1e-6 and tor <= 1e-9 and comp <= 1e-9 and indep <= 1e-9
    criterion(7, ok, f"AD vs FD {fd:.2e}; torsion {tor:.2e}; metric compat {comp:.2e}; "
                     f"codiff frame independence {indep:.2e}")
    assert ok


def test_criterion_8_cli_contract(criterion):
    cmd = [sys.executable, "-m", "contactsub", "verify", "--example", "hopf_s3", "--checks", "all",
           "--seed", str(SEED), "--format", "json"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    ok = a.returncode == 0 and b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    criterion(8, ok, f"exit codes {a.returncode},{b.returncode}; identical JSON {a.stdout == b.stdout} "
                     f"({len(a.stdout)} bytes)")
    assert ok
