import numpy as np
import pytest
from hypothesis import given, strategies as st

from wolffsys import (InvalidArgument, ParameterError, gamma_exponents, limit_constant,
                      lower_bound_sequence, subsolution_scale)


@st.composite
def valid_triple(draw):
    p = draw(st.floats(1.01, 10.0))
    a = p - 1
    q1 = draw(st.floats(1e-3, 1 - 1e-3)) * a
    q2 = draw(st.floats(1e-3, 1 - 1e-3)) * a
    return p, q1, q2


def test_gamma_worked_example():
    ex = gamma_exponents(3.0, 1.0, 0.5)
    assert ex.gamma1 == pytest.approx(12 / 7, rel=1e-15)
    assert ex.gamma2 == pytest.approx(10 / 7, rel=1e-15)
    assert ex.denom == pytest.approx(3.5)


def test_gamma_symmetric_sublinear_value():
    # (p-1)/(p-1-q) with p=2, q=0.5
    ex = gamma_exponents(2.0, 0.5, 0.5)
    assert ex.gamma1 == pytest.approx(2.0) and ex.gamma2 == pytest.approx(2.0)


@given(valid_triple())
def test_gamma_identities_within_4_ulp(t):
    p, q1, q2 = t
    ex = gamma_exponents(p, q1, q2)
    a = p - 1
    assert abs(ex.gamma1 - ((q1 / a) * ex.gamma2 + 1)) <= 4 * np.spacing(ex.gamma1)
    assert abs(ex.gamma2 - ((q2 / a) * ex.gamma1 + 1)) <= 4 * np.spacing(ex.gamma2)
    assert ex.gamma1 > 1 and ex.gamma2 > 1


@given(st.floats(1.01, 10.0), st.floats(1e-3, 1 - 1e-3))
def test_equal_exponents_give_equal_gammas(p, s):
    q = s * (p - 1)
    ex = gamma_exponents(p, q, q)
    assert ex.gamma1 == ex.gamma2


@pytest.mark.parametrize("p,q1,q2", [(1.0, 0.1, 0.1), (2.0, 0.0, 0.5), (2.0, 0.5, 1.0), (2.0, -0.1, 0.5),
                                     (np.nan, 0.5, 0.5)])
def test_invalid_ranges(p, q1, q2):
    with pytest.raises(InvalidArgument):
        gamma_exponents(p, q1, q2)


def test_delta_hand_iteration():
    seq = lower_bound_sequence(2.0, 0.5, 0.5, J=50)
    assert seq.delta(1) == 1.0
    assert seq.delta(2) == pytest.approx(1.75, abs=1e-15)
    assert seq.delta(50) == pytest.approx(2.0, abs=1e-14)


def test_delta_200_contraction_one_eighth():
    seq = lower_bound_sequence(3.0, 1.0, 0.5, J=200)
    assert seq.ratio == pytest.approx(1 / 8)
    assert abs(seq.delta(200) - 12 / 7) <= 1e-10


@given(valid_triple())
def test_delta_increases_to_gamma1(t):
    p, q1, q2 = t
    seq = lower_bound_sequence(p, q1, q2, J=60, early_exit=0)
    d = seq.deltas
    assert np.all(np.diff(d) >= -1e-12)
    assert np.all(d <= seq.gamma1 * (1 + 1e-12))
    # geometric contraction: the gap shrinks by the ratio each step
    gaps = seq.gamma1 - d[:10]
    np.testing.assert_allclose(gaps[1:], seq.ratio * gaps[:-1], rtol=1e-8, atol=1e-13)


@given(st.floats(1e-3, 1e3))
def test_kappa_one_collapses_constants(c1):
    seq = lower_bound_sequence(2.0, 0.5, 0.5, kappa=1.0, c1=c1, J=40, early_exit=0)
    r = seq.ratio
    expect = c1 ** (r ** np.arange(40))
    np.testing.assert_allclose(seq.consts, expect, rtol=1e-12)
    assert seq.limit == 1.0


@given(valid_triple(), st.floats(0.05, 1.0))
def test_constants_converge_to_closed_form(t, kappa):
    p, q1, q2 = t
    seq = lower_bound_sequence(p, q1, q2, kappa=kappa, J=100_000)
    assert seq.const(10 ** 6) == pytest.approx(limit_constant(p, q1, q2, kappa), rel=1e-8)


def test_limit_constant_closed_form_value():
    # p=2, q=0.5: exponent q1 (p-1)[(p-1)^2 + 2(p-1) q2 + q1 q2] / ((p-1)^2 - q1 q2)^2
    e = 0.5 * (1 + 1 + 0.25) / 0.75 ** 2
    assert limit_constant(2.0, 0.5, 0.5, 0.3) == pytest.approx(0.3 ** e, rel=1e-14)


def test_subsolution_scale_examples():
    assert subsolution_scale(2.0, 0.5, 0.5, 1.0) == 1.0
    assert subsolution_scale(2.0, 0.5, 0.5, 0.5) == pytest.approx(0.25, rel=1e-15)


@given(valid_triple(), st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
def test_subsolution_scale_monotone_in_kappa(t, k1, k2):
    p, q1, q2 = t
    lo, hi = sorted((k1, k2))
    assert subsolution_scale(p, q1, q2, lo) <= subsolution_scale(p, q1, q2, hi) * (1 + 1e-12)


def test_bad_kappa_and_J():
    with pytest.raises(InvalidArgument):
        lower_bound_sequence(2.0, 0.5, 0.5, kappa=0.0)
    with pytest.raises(InvalidArgument):
        lower_bound_sequence(2.0, 0.5, 0.5, J=0)
    with pytest.raises(InvalidArgument):
        subsolution_scale(2.0, 0.5, 0.5, -1.0)
