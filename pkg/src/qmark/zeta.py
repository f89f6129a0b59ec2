"""
Special values of the Dirichlet series M(s) = sum_n d_n n^-s.

Even integers come from the moments through the Bernoulli generating
function; M(1) from a fast series in zeta(2n) - 1 and the moments, with a
slow cotangent-integral route and the direct Dirichlet sum as checks.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mpf

from .exact import question_mark_fixed
from .fourier import CoefficientTable
from .measure import MomentTable, integrate_functional, log1p_fn, log1p_series, moments, TransferOperatorSpec
from .numerics import (DEFAULT, BigReal, PrecisionContext, bernoulli, fmt_decimal, zeta_even,
                       zeta_even_minus_one)


class Route(enum.Enum):
    EVENMO = "evenmo"
    PROP4 = "moment_series"
    DIRECT = "direct"
    COT = "cotangent"


@dataclass(frozen=True)
class ZetaValue:
    s: int
    value: BigReal
    route: Route


def _evenmo(v: int, table: MomentTable, ctx: PrecisionContext) -> BigReal:
    with ctx.workprec():
        if 2 * v > table.Lmax:
            raise ValueError(f"moments cover L <= {table.Lmax}, need {2 * v}")
        terms, errs = [], []
        for L in range(2 * v + 1):
            b = bernoulli(2 * v - L)
            if b == 0:
                continue
            c = mpf(b.numerator) / b.denominator / (mpmath.factorial(2 * v - L) * mpmath.factorial(L))
            terms.append(c * table[L].value)
            errs.append(abs(c) * table[L].err)
        scale = (2 * mpmath.pi) ** (2 * v) * (-1) ** (v + 1) / 2
        s = mpmath.fsum(terms)
        err = abs(scale) * (mpmath.fsum(errs) + 8 * len(terms) * max(abs(t) for t in terms) * ctx.eps)
        return BigReal(scale * s, err)


def m_even(v: int, table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """M(2v) = (2 pi)^2v (-1)^(v+1)/2 sum_L B_{2v-L} m_L / ((2v-L)! L!)."""
    if v < 1:
        raise ValueError("v must be >= 1")
    return _evenmo(v, table or moments(260, ctx), ctx)


def m_zero_diagnostic(table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """The even-value formula at 2v = 0, which should give -1/2."""
    table = table or MomentTable((BigReal.exact(1), BigReal.exact(mpf(1) / 2)))
    return _evenmo(0, table, ctx)


def _zeta_moment_sum(table: MomentTable, ctx: PrecisionContext) -> BigReal:
    """sum_n (zeta(2n) - 1) m_2n / n with a geometric tail envelope."""
    with ctx.workprec():
        terms, errs = [], []
        N = table.Lmax // 2
        for n in range(1, N + 1):
            z = zeta_even_minus_one(n, ctx)
            m = table[2 * n]
            terms.append(z.value * m.value / n)
            errs.append((z.value * m.err + z.err * m.value) / n)
        # zeta(2n) - 1 < 2^(1-2n) and m_2n <= m_Lmax beyond the table
        tail = mpf(2) ** (1 - 2 * (N + 1)) * (table[table.Lmax].value + table[table.Lmax].err) / (N + 1) * 2
        return BigReal(mpmath.fsum(terms), mpmath.fsum(errs) + tail + len(terms) * ctx.eps)


def m_one(table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """M(1) = sum (zeta(2n)-1) m_2n / n - 3 sum m_n / (n 2^n) - log pi + log 4."""
    table = table or moments(260, ctx)
    a = _zeta_moment_sum(table, ctx)
    # sum m_n / (n 2^n) = log 2 - int log(1+x) d?
    b = log1p_series(table, ctx)
    with ctx.workprec():
        s = mpmath.log(2) - b.value
        const = -mpmath.log(mpmath.pi) + mpmath.log(4)
        return BigReal(a.value - 3 * s + const, a.err + 3 * b.err + 8 * ctx.eps)


@dataclass(frozen=True)
class TtarPieces:
    qm_over_x: BigReal          # int (?(x) - x) dx / x
    zeta_rational: BigReal      # sum zeta(2n) / (n (2n + 1))
    zeta_moment: BigReal        # sum zeta(2n) m_2n / n

    @property
    def total(self) -> BigReal:
        return self.qm_over_x - self.zeta_rational + self.zeta_moment


def zeta_rational_sum(ctx: PrecisionContext = DEFAULT) -> BigReal:
    """sum_n zeta(2n) / (n (2n+1)) computed as 2 - 2 log 2 + sum (zeta(2n)-1) / (n (2n+1))."""
    with ctx.workprec():
        terms = []
        n = 1
        while True:
            z = zeta_even_minus_one(n, ctx).value
            t = z / (n * (2 * n + 1))
            terms.append(t)
            if z < ctx.eps and n > 2:
                break
            n += 1
        tail = mpf(2) ** (1 - 2 * (n + 1)) / (n * n)
        return BigReal(2 - 2 * mpmath.log(2) + mpmath.fsum(terms), tail + 8 * n * ctx.eps)


def ttar_decomposition(table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT,
                       spec: TransferOperatorSpec | None = None) -> TtarPieces:
    """The three pieces of the cotangent expansion of M(1).

    int log(1+x) d? is taken from operator quadrature here, so the
    recombination is independent of the moment series used by m_one.
    """
    table = table or moments(260, ctx)
    lg = integrate_functional(spec or TransferOperatorSpec(degree=64), log1p_fn(), ctx)
    a = -1 + 2 * lg
    b = zeta_rational_sum(ctx)
    c = _zeta_moment_sum(table, ctx) + lg
    return TtarPieces(a, b, c)


def m_one_cotangent(N: int = 55000, bits: int = 64) -> BigReal:
    """pi int_0^1 (?(x) - x) cot(pi x) dx by the trapezoid rule on N equal cells.

    ?(i/N) is evaluated exactly and rounded; the integrand extends
    continuously to -1/pi at both ends. No error bound is attached; the
    observed accuracy at N = 55000 is about 5 digits.
    """
    i = np.arange(1, N)
    q = np.array([question_mark_fixed(int(k), N, bits) for k in i], dtype=object)
    qm = np.array([math.ldexp(int(v), -bits) for v in q])
    x = i / N
    g = (qm - x) / np.tan(np.pi * x)
    ends = -1 / math.pi
    s = math.fsum(g.tolist()) + ends
    return BigReal(mpf(math.pi * s / N), None)


def m_direct(s, table: CoefficientTable, nmax: int | None = None, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """sum_{n <= nmax} d_n n^-s plus the envelope sum_{n > nmax} n^-s (|d_n| <= 1)."""
    nmax = nmax or table.nmax
    with ctx.workprec():
        s = mpf(s)
        if s <= 1:
            raise ValueError("the coarse tail envelope needs s > 1")
        terms, errs = [], []
        for n in range(1, nmax + 1):
            d = table[n]
            w = mpf(n) ** (-s)
            terms.append(d.value * w)
            errs.append((d.err if d.err is not None else mpf(2)) * w)
        tail = mpf(nmax) ** (1 - s) / (s - 1)
        return BigReal(mpmath.fsum(terms), mpmath.fsum(errs) + tail + nmax * ctx.eps)


def d1_from_even(v: int, table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """Diagnostic: d_1 ~ M(2v) for large v."""
    return m_even(v, table, ctx)


def d2_from_even(v: int, d1: BigReal, table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """Diagnostic: d_2 ~ 2^2v (M(2v) - d_1); only a few digits survive."""
    return (m_even(v, table, ctx) - d1) * (mpf(4) ** v)


def zeta_rows(values: list[ZetaValue], digits: int = 30):
    for z in values:
        e = z.value.err
        yield [z.s, z.route.value, fmt_decimal(z.value.value, digits), "unknown" if e is None else mpmath.nstr(e, 3)]


def to_csv(values: list[ZetaValue], path_or_file, digits: int = 30):
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(["s", "route", "value", "err"])
        w.writerows(zeta_rows(values, digits))
    finally:
        if own:
            fh.close()
