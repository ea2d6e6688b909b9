"""Sign/log-magnitude arithmetic used for the huge regularizing products."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rabispec import SignedLog, signedlog_product

finite_nonzero = st.floats(min_value=1e-280, max_value=1e280).flatmap(
    lambda m: st.sampled_from([m, -m]))


@settings(max_examples=100, deadline=None)
@given(v=finite_nonzero)
def test_roundtrip_within_one_ulp(v):
    w = SignedLog.from_float(v).value()
    assert abs(w - v) <= math.ulp(v)


def test_zero_is_canonical():
    z = SignedLog.from_float(0.0)
    assert z.sign == 0
    assert z.value() == 0.0
    a = SignedLog.from_float(3.7)
    assert (a * z).sign == 0
    assert (z * a).value() == 0.0


def test_multiplication_composes_signs_and_adds_logs():
    a = SignedLog.from_float(-2.0)
    b = SignedLog.from_float(8.0)
    c = a * b
    assert c.sign == -1
    assert c.log_mag == pytest.approx(math.log(16.0), rel=1e-15)
    assert c.value() == pytest.approx(-16.0, rel=1e-14)


def test_overflowing_product_stays_finite_in_log_space():
    factors = [SignedLog.from_float(1e200) for _ in range(5)]
    prod = signedlog_product(factors)
    assert prod.sign == 1
    assert prod.log_mag == pytest.approx(5 * 200 * math.log(10.0), rel=1e-12)
    assert prod.value() == math.inf  # only the float view saturates


def test_product_associativity_over_permutations():
    rng = np.random.default_rng(42)
    vals = rng.uniform(-50, 50, size=24)
    vals = vals[vals != 0]
    ref = signedlog_product(SignedLog.from_float(v) for v in vals)
    for _ in range(25):
        perm = rng.permutation(len(vals))
        q = signedlog_product(SignedLog.from_float(vals[i]) for i in perm)
        assert q.sign == ref.sign
        assert q.log_mag == pytest.approx(ref.log_mag, rel=1e-12)


def test_negation_and_scaled_view():
    a = SignedLog.from_float(-3.0)
    assert (-a).value() == pytest.approx(3.0)
    assert a.scaled(math.log(3.0)) == pytest.approx(-1.0, rel=1e-14)


def test_nan_rejected():
    with pytest.raises(ValueError):
        SignedLog.from_float(float("nan"))
