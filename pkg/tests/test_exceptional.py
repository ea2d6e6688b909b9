"""Constraint values, S1/S2 location, classification, oracle verification."""
import math

import numpy as np
import pytest

from rabispec import (Baseline, Branch, ModelParams, NotExceptional,
                      ResonantParameters, Truncation, classify,
                      constraint_value, find_s1, find_s2, g_eps)

P13 = ModelParams(1.0, 0.2, 1.2, 0.3)


def test_constraint_analytic_root_n1_plus():
    # K_1 on the minus branch at x_p = 1.3 vanishes iff delta^2 + 4g^2 = 1.6
    assert constraint_value(Baseline(1, Branch.PLUS), P13) == pytest.approx(
        0.0, abs=1e-14)


def test_constraint_classic_symmetric_relation():
    # eps = 0 first crossing relation delta^2 + 4g^2 = 1
    p = ModelParams(1.0, 0.4, 0.6, 0.0)
    assert constraint_value(Baseline(1, Branch.PLUS), p) == pytest.approx(
        0.0, abs=1e-14)


def test_constraint_n0_is_one():
    for p in (P13, ModelParams(1.0, 0.9, 0.4, 0.1)):
        for br in (Branch.PLUS, Branch.MINUS):
            assert constraint_value(Baseline(0, br), p) == 1.0


def test_constraint_rejects_resonant_bias():
    p = ModelParams(1.0, 0.3, 1.0, 0.5)
    with pytest.raises(ResonantParameters):
        constraint_value(Baseline(1, Branch.PLUS), p)


def test_find_s1_single_root_at_g02():
    pts = find_s1(Baseline(1, Branch.PLUS), 1.2, 0.01, 2.0, P13, verify=True)
    assert len(pts) == 1
    q = pts[0]
    assert q.g == pytest.approx(0.2, abs=1e-8)
    assert q.kind == "S1"
    assert q.greg_zero
    assert q.energy == pytest.approx(1.26, abs=1e-9)
    # the bias term lifts the crossing: the oracle level there is simple
    assert q.oracle.nearest_error < 1e-8
    assert q.oracle.pair_gap > 0.1


def test_find_s1_empty_when_delta_too_large():
    # delta^2 = 1.69 > 1.6 leaves no real coupling on the N=1 plus baseline
    pts = find_s1(Baseline(1, Branch.PLUS), 1.3, 0.01, 2.0, P13, verify=False)
    assert pts == []


def test_find_s1_zero_bias_juddian_point():
    p0 = ModelParams(1.0, 0.1, 0.6, 0.0)
    pts = find_s1(Baseline(1, Branch.PLUS), 0.6, 0.01, 2.0, p0)
    assert len(pts) == 1
    q = pts[0]
    assert q.g == pytest.approx(0.4, abs=1e-8)
    # the symmetric model keeps the two-fold degeneracy at the crossing
    assert q.oracle.degenerate
    assert q.oracle.pair_gap < 1e-6


def test_find_s1_n0_empty():
    assert find_s1(Baseline(0, Branch.PLUS), 1.2, 0.01, 5.0, P13) == []
    assert find_s1(Baseline(0, Branch.MINUS), 3.3, 0.01, 5.0, P13) == []


def test_find_s2_counts_n1():
    for br in (Branch.PLUS, Branch.MINUS):
        pts = find_s2(Baseline(1, br), 1.2, 0.0125, 5.0, P13, verify=True)
        s2 = [q for q in pts if q.kind == "S2"]
        assert len(s2) == 1
        for q in s2:
            assert q.oracle.single
            assert q.oracle.n_within_1e2 == 1


def test_find_s2_excludes_s1_roots():
    s1 = find_s1(Baseline(1, Branch.PLUS), 1.2, 0.0125, 5.0, P13, verify=False)
    s2 = find_s2(Baseline(1, Branch.PLUS), 1.2, 0.0125, 5.0, P13, verify=False)
    for a in s1:
        for b in s2:
            assert abs(a.g - b.g) > 1e-6


def test_residue_decay_at_s1_point():
    # the matched series residue vanishes: |(x - x_p) G(x)| must shrink
    p = P13
    xp = 1.3
    t = Truncation()
    vals = []
    for d in (1e-4, 5e-5):
        v = g_eps(xp + d, p, t).value
        vals.append(abs(d) * math.exp(v.log_mag))
    assert vals[0] / vals[1] >= 1.9


def test_classify_s1():
    q = classify(Baseline(1, Branch.PLUS), 1.2, 0.2, P13)
    assert q.kind == "S1"
    assert abs(q.constraint_value) < 1e-10


def test_classify_s2_point():
    pts = find_s2(Baseline(1, Branch.PLUS), 1.2, 0.0125, 2.0, P13, verify=False)
    q = classify(Baseline(1, Branch.PLUS), 1.2, pts[0].g, P13)
    assert q.kind == "S2"
    assert abs(q.constraint_value) > 1e-3


def test_classify_rejects_non_exceptional():
    with pytest.raises(NotExceptional):
        classify(Baseline(1, Branch.PLUS), 1.2, 0.05, P13)


def test_zero_bias_reduction():
    # at eps = 0 the S1 condition is the symmetric-model constraint at x = N
    p0 = ModelParams(1.0, 0.4, 0.6, 0.0)
    b = Baseline(1, Branch.PLUS)
    assert b.x_p(p0) == 1.0
    assert constraint_value(b, p0) == pytest.approx(0.0, abs=1e-14)


def test_point_record_schema():
    from rabispec.exceptional import point_record
    pts = find_s1(Baseline(1, Branch.PLUS), 1.2, 0.01, 2.0, P13, verify=True)
    rec = point_record(pts[0])
    assert rec["N"] == 1
    assert rec["branch"] == "plus"
    assert rec["class"] == "S1"
    for key in ("delta", "g", "x_p", "energy", "constraint_value", "oracle"):
        assert key in rec
