from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from qmark.numerics import (BigReal, PrecisionContext, bernoulli, fmt_decimal, si, si_split, sine_integral_tail,
                            twopow_log_series, zeta_even, zeta_even_minus_one)

CTX = PrecisionContext(256)


@pytest.mark.parametrize("k", list(range(0, 40)) + [100, 260])
def test_bernoulli_matches_mpmath(k):
    p, q = mpmath.bernfrac(k)
    expect = Fraction(int(p), int(q))
    if k == 1:
        expect = Fraction(-1, 2)
    assert bernoulli(k) == expect


@pytest.mark.parametrize("n", [1, 2, 3, 5, 10, 20, 21, 60, 130])
def test_zeta_even(n):
    with mpmath.workprec(600):
        ref = mpmath.zeta(2 * n)
        z = zeta_even(n, CTX)
        zm = zeta_even_minus_one(n, CTX)
        assert abs(z.value - ref) <= z.err + ref * mpf(2) ** -300
        # relative accuracy of zeta(2n) - 1 survives the cancellation
        assert abs(zm.value - (ref - 1)) <= zm.err + (ref - 1) * mpf(2) ** -300
        assert zm.err <= (ref - 1) * mpf(2) ** -250


def test_zeta_two():
    with CTX.workprec():
        assert abs(zeta_even(1, CTX).value - mpmath.pi ** 2 / 6) < mpf(2) ** -300


@pytest.mark.parametrize("a", ["1/100", "1/7", 1, 3, 29, 30, 45, 100, "12345/7"])
def test_sine_integral_tail(a):
    a = Fraction(a)
    with mpmath.workprec(700):
        x = mpf(a.numerator) / a.denominator
        ref = mpmath.pi / 2 - mpmath.si(2 * mpmath.pi * x)
    s = sine_integral_tail(x, CTX)
    assert s.err < mpf(2) ** -250
    assert abs(s.value - ref) <= s.err


def test_si_branches_agree_near_split():
    x = si_split(CTX) * 1.01
    with CTX.workprec():
        a = sine_integral_tail(x / (2 * mpmath.pi), CTX)
        ref = mpmath.pi / 2 - mpmath.si(mpf(x))
    assert abs(a.value - ref) <= a.err


def test_si_odd():
    assert si(0, CTX).value == 0
    assert abs(si(-3, CTX).value + si(3, CTX).value) < mpf(2) ** -250


@pytest.mark.parametrize("r", [1, 2, 3])
def test_twopow_log_series(r):
    s = twopow_log_series(r, CTX)
    with mpmath.workprec(400):
        ref = mpmath.nsum(lambda n: mpmath.log(n) ** r / 2 ** n, [1, mpmath.inf])
    assert abs(s.value - ref) <= s.err + mpf(2) ** -280


def test_twopow_partial_sum():
    assert fmt_decimal(twopow_log_series(1, CTX).value, 25) == "0.5078339228684383921890418"
    assert twopow_log_series(1, CTX, terms=1).value == 0


def test_fmt_decimal():
    assert fmt_decimal(mpf(1) / 2, 5) == "0.50000"
    assert fmt_decimal(mpf("-0.4559592037402456"), 4) == "-0.4560"
    assert fmt_decimal(0, 3) == "0.00"
    assert fmt_decimal(mpf("123.456"), 4) == "123.5"


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(32)
    with pytest.raises(ValueError):
        PrecisionContext(128, -1)
    c = PrecisionContext(128)
    assert c.doubled().bits == 256
    assert c.work_bits == 192
    assert c.tol == mpf(2) ** -80


def test_bigreal_keeps_precision_outside_workprec():
    with mpmath.workprec(300):
        third = mpf(1) / 3
    b = BigReal(third, 0)
    c = 1 - b
    with mpmath.workprec(300):
        assert abs(c.value - mpf(2) / 3) < mpf(2) ** -290
    assert BigReal(Fraction(1, 3)).value._mpf_[3] > 300


reals = st.floats(-1e3, 1e3, allow_nan=False)
errs = st.floats(0, 1, allow_nan=False)


@given(reals, errs, reals, errs, st.floats(-1, 1), st.floats(-1, 1), st.sampled_from("+-*/"))
def test_bigreal_error_propagation(a, ea, b, eb, ta, tb, op):
    # any perturbation inside the error bars stays inside the result's bar
    x, y = BigReal(a, ea), BigReal(b, eb)
    xa, yb = mpf(a) + ta * ea, mpf(b) + tb * eb
    if op == "/" and abs(b) <= eb + 1e-9:
        return
    r = {"+": lambda: x + y, "-": lambda: x - y, "*": lambda: x * y, "/": lambda: x / y}[op]()
    t = {"+": xa + yb, "-": xa - yb, "*": xa * yb, "/": xa / yb if op == "/" else 0}[op]
    assert abs(r.value - t) <= r.err * (1 + 1e-12) + 1e-9 * abs(t)


def test_bigreal_unknown_error():
    u = BigReal(1, None)
    assert (u + 1).err is None and (u * 2).err is None
    assert not u.contains(1)
    assert BigReal(1, 0).contains(1)
    assert BigReal(1, mpf("0.1")).agrees(BigReal(mpf("1.05"), mpf("0.01")))
