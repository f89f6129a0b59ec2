import json
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from qmark.exact import ResourceError, question_mark
from qmark.numerics import BigReal
from qmark.salem import (ConvolutionSample, c_beta, correlation, fit_exponent, gaps, histogram, sigma_sum,
                         symmetry_defect)


@pytest.mark.parametrize("N, v", [(1, 1), (2, Fraction(1, 2)), (3, Fraction(3, 8))])
def test_small_sigma(N, v):
    s = sigma_sum(N)
    assert s.sum_value.value == mpf(v.numerator) / v.denominator


@settings(max_examples=30)
@given(st.integers(1, 300))
def test_sigma_exact_oracle(N):
    q = [question_mark(Fraction(i, N)).to_fraction() for i in range(N + 1)]
    exact = sum((b - a) ** 2 for a, b in zip(q, q[1:]))
    s = sigma_sum(N)
    with mpmath.workprec(400):
        assert abs(s.sum_value.value - mpf(exact.numerator) / exact.denominator) <= s.sum_value.err


@pytest.mark.parametrize("N", [2, 3, 10, 100, 1000, 5000])
def test_monotone_refinement(N):
    assert sigma_sum(2 * N).sum_value.value < sigma_sum(N).sum_value.value


def test_gaps_sum_to_one():
    g = gaps(1000)
    assert sum(g) == 1 << 320
    # ?(1/N) = 2^(1-N) is below 2^-320, so the outer gaps truncate to 0
    assert all(x >= 0 for x in g) and all(x > 0 for x in g[300:700])
    assert g == g[::-1]


def test_cbeta_profile():
    N = 1000
    rows = c_beta(10, N)
    assert [float(r.beta) for r in rows] == [j / 10 for j in range(21)]
    assert rows[0].sum_value.value == 0 and rows[-1].sum_value.value == 0
    # beta = 1 is Sigma(N) and dominates the profile
    assert rows[10].sum_value.value == sigma_sum(N).sum_value.value
    assert all(r.scaled < rows[10].scaled for r in rows if r.beta != 1)
    assert symmetry_defect(rows) < 0.05
    with mpmath.workprec(320):
        for r in rows:
            assert r.scaled == N * r.sum_value.value


def test_cbeta_grid_must_divide():
    with pytest.raises(ValueError):
        c_beta(7, 1000)


def test_correlation_bruteforce():
    g = [3, 1, 4, 1, 5]
    for k in range(0, 11):
        want = sum(g[i] * g[k - 1 - i] for i in range(5) if 0 <= k - 1 - i < 5)
        assert correlation(g, k) == want


def test_thread_count_invariance():
    a = sigma_sum(70000, threads=1)
    b = sigma_sum(70000, threads=2)
    assert a.sum_value.value == b.sum_value.value


def test_histogram():
    h = histogram(64)
    assert len(h) == 64 and abs(sum(v for _, v in h) / 64 - 1) < 1e-12


def test_cap():
    with pytest.raises(ResourceError):
        sigma_sum(10 ** 7 + 1)
    with pytest.raises(ValueError):
        sigma_sum(0)


def _synthetic(Ns, f):
    return [ConvolutionSample(N, mpf(1), BigReal(f(N), 0), N * f(N)) for N in Ns]


def test_fit_exact_power_law():
    Ns = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7, 3 * 10 ** 7]
    f = fit_exponent(_synthetic(Ns, lambda N: mpf(7) / N))
    assert abs(f.slope + 1) < 1e-6 and f.r2 > 1 - 1e-12
    assert f.conjecture_consistent and f.below_lipschitz
    assert json.loads(f.to_json())["N_list"] == Ns


def test_fit_needs_samples():
    with pytest.raises(ValueError):
        fit_exponent(_synthetic([10, 100, 1000, 10000, 100000], lambda N: mpf(1) / N))
    with pytest.raises(ValueError):
        fit_exponent(_synthetic([10, 20, 30, 40, 50, 60], lambda N: mpf(1) / N))


def test_sample_nonnegative():
    with pytest.raises(ValueError):
        ConvolutionSample(1, mpf(1), BigReal(-1, 0), mpf(-1))
