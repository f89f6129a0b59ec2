import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from qmark.exact import farey_arrays
from qmark.fourier import (ALPHA, FLOAT_OPERATOR, Method, RangeError, dn_compound_table, dn_operator, dn_stieltjes,
                           dn_stieltjes_table, dn_taylor, hat, partial_sum_stats, phi_series, sine_channel, taylor_nmax,
                           trig_sums, weyl_sum)
from qmark.numerics import PrecisionContext

LOW = PrecisionContext(128)


def test_alpha():
    assert abs(ALPHA - 0.7202100) < 1e-6


def test_taylor_range(moment_table, ctx):
    assert taylor_nmax(moment_table, ctx) >= 10
    with pytest.raises(RangeError):
        dn_taylor(20, moment_table, ctx)
    with pytest.raises(ValueError):
        dn_taylor(0, moment_table, ctx)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_operator_matches_taylor(moment_table, ctx, n):
    a = dn_taylor(n, moment_table, ctx)
    b = dn_operator(n, LOW)
    assert abs(a.value - b.value) <= a.err + b.err


def test_float_operator_matches_compound():
    vals, errs = dn_compound_table(60)
    for n in (11, 23, 40, 60):
        b = dn_operator(n, LOW, FLOAT_OPERATOR)
        assert abs(float(b.value) - vals[n]) <= float(b.err) + errs[n]


def test_compound_matches_taylor(coeffs):
    vals, errs = dn_compound_table(10)
    for n in range(1, 11):
        assert abs(vals[n] - float(coeffs[n].value)) < 1e-15 + errs[n]


def test_pipeline_methods(coeffs):
    assert coeffs.methods[10] is Method.TAYLOR
    assert coeffs.methods[11] is Method.OPERATOR
    assert coeffs.methods[201] is Method.STIELTJES
    assert max(coeffs.errors(10000)[1:]) < 1e-10


def test_midpoint_sums_give_a_few_digits(coeffs):
    for n in (1, 4, 9):
        assert abs(dn_stieltjes(n, 18).value - coeffs[n].value) < 1e-4
    assert dn_stieltjes(3, 10).err is None


def test_midpoint_table_matches_scalar():
    t = dn_stieltjes_table(30, 12)
    for n in (1, 7, 30):
        assert abs(t[n] - float(dn_stieltjes(n, 12).value)) < 1e-13


@settings(max_examples=30)
@given(st.integers(1, 400), st.integers(0, 2 ** 31))
def test_trig_sums_match_direct(nmax, seed):
    rng = np.random.default_rng(seed)
    x = rng.random(300)
    w = rng.standard_normal(300)
    S = trig_sums(x, w, nmax)
    n = np.arange(nmax + 1)
    ref = np.exp(2j * np.pi * n[:, None] * x[None, :]) @ w
    assert np.max(np.abs(S - ref)) < 1e-12 * np.abs(w).sum()


def test_weyl_sum_is_the_midpoint_sum():
    w = weyl_sum(5, 14)
    assert abs(w.real - float(dn_stieltjes(5, 14).value)) < 1e-14
    assert abs(w.imag) < 1e-14


def test_weyl_sum_thread_independent():
    assert weyl_sum(7, 19, threads=1) == weyl_sum(7, 19, threads=3)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_sine_channel_vanishes(n):
    s = sine_channel(n, LOW)
    assert abs(s.value) <= s.err


def test_hat():
    h = hat(3, dn_taylor(3))
    with mpmath.workprec(256):
        assert abs(h.value.value - (1 - dn_taylor(3).value)) < mpf(10) ** -60


def test_partial_sum_bounds(coeffs):
    st_ = partial_sum_stats(coeffs.array(10000))
    om, wr = st_.omega_ratio, st_.wiener_ratio
    # both ratios stay bounded; the last decade does not outgrow the earlier range
    assert np.max(om[1000:]) <= 1.05 * np.max(om[:1000]) + 0.5
    assert np.max(wr[1000:]) <= 1.05 * np.max(wr[:1000]) + 0.5


def test_phi_series(coeffs):
    d = coeffs.array(10000)
    # Phi(x) = Delta({x}); ?(1/3) = 1/4 gives Delta(1/2) = 3/4
    assert abs(phi_series(0.5, d, 10000) - 0.75) < 1e-10
    assert abs(phi_series(0.25, d, 10000) - phi_series(1.25, d, 10000)) < 1e-14
