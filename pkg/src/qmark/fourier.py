"""
Fourier-Stieltjes coefficients d_n = int cos(2 pi n x) d?(x).

Three routes: the Taylor series in the moments (small n, full precision),
operator quadrature (moderate n), and Riemann-Stieltjes sums over Farey
cells (any n, low precision). Tables for large n use a compound Gauss
rule on adaptively refined Farey cells together with a binned FFT.
"""
from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mpf

from .exact import DEPTH_CAP, ResourceError, farey_arrays, iter_farey
from .measure import (MomentTable, Rule, TransferOperatorSpec, compound_points, cos_2pi,
                      integrate, moments, sin_2pi, stieltjes_sum)
from .numerics import DEFAULT, BigReal, PrecisionContext, fmt_decimal

ALPHA = math.log(2) / (2 * math.log((1 + math.sqrt(5)) / 2))


class Method(enum.Enum):
    TAYLOR = "taylor"
    OPERATOR = "operator"
    STIELTJES = "stieltjes"


class RangeError(ValueError):
    """The moment table is too short for the requested coefficient."""


@dataclass
class CoefficientTable:
    """d_1..d_nmax with per-entry method and error."""

    values: dict[int, BigReal] = field(default_factory=dict)
    methods: dict[int, Method] = field(default_factory=dict)
    precision_bits: int = 256

    @property
    def nmax(self) -> int:
        return max(self.values) if self.values else 0

    def __getitem__(self, n: int) -> BigReal:
        return self.values[n]

    def set(self, n: int, v: BigReal, method: Method):
        self.values[n] = v
        self.methods[n] = method

    def array(self, nmax: int | None = None) -> np.ndarray:
        """float64 array a with a[n] = d_n (a[0] = 1)."""
        nmax = nmax or self.nmax
        out = np.empty(nmax + 1)
        out[0] = 1.0
        for n in range(1, nmax + 1):
            out[n] = float(self.values[n].value)
        return out

    def errors(self, nmax: int | None = None) -> np.ndarray:
        nmax = nmax or self.nmax
        out = np.zeros(nmax + 1)
        for n in range(1, nmax + 1):
            e = self.values[n].err
            out[n] = math.inf if e is None else float(e)
        return out

    def rows(self, digits: int = 30):
        for n in sorted(self.values):
            v = self.values[n]
            yield [n, self.methods[n].value, fmt_decimal(v.value, digits),
                   "unknown" if v.err is None else mpmath.nstr(v.err, 3)]

    def to_csv(self, path_or_file, digits: int = 30):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["n", "method", "value", "err"])
            w.writerows(self.rows(digits))
        finally:
            if own:
                fh.close()


@dataclass(frozen=True)
class HatCoefficient:
    n: int
    value: BigReal


def hat(n: int, d: BigReal) -> HatCoefficient:
    """d^_n = 1 - d_n."""
    return HatCoefficient(n, 1 - d)


# -- Taylor route ------------------------------------------------------------

def dn_taylor(n: int, table: MomentTable | None = None, ctx: PrecisionContext = DEFAULT,
              tol=None) -> BigReal:
    """d_n = sum_k (-1)^k (2 pi n)^2k m_2k / (2k)!.

    Terms past the table are bounded by m_Lmax times the tail of the
    exponential series; if that bound exceeds ``tol`` (default ctx.tol) a
    RangeError is raised instead of truncating silently.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table = table or moments(260, ctx)
    tol = ctx.tol if tol is None else mpf(tol)
    with ctx.workprec():
        x = 2 * mpmath.pi * n
        x2 = x * x
        Lmax = table.Lmax - table.Lmax % 2
        c = mpf(1)                  # x^2k / (2k)!
        terms, errs, mags = [], [], []
        for k in range(Lmax // 2 + 1):
            if k:
                c = c * x2 / ((2 * k - 1) * (2 * k))
            m = table[2 * k]
            terms.append((-1) ** k * c * m.value)
            errs.append(c * m.err)
            mags.append(abs(terms[-1]))
        # remainder: sum_{j > Lmax} x^j / j! * m_Lmax
        nxt = c * x / (Lmax + 1)
        trunc = mpf(0)
        j = Lmax + 1
        while True:
            trunc += nxt
            j += 1
            nxt = nxt * x / j
            if j > x and nxt < trunc * ctx.eps:
                break
        trunc *= table[table.Lmax].value + table[table.Lmax].err
        if trunc > tol:
            raise RangeError(f"moment table up to L={table.Lmax} leaves truncation {mpmath.nstr(trunc, 3)} for n={n}")
        v = mpmath.fsum(terms)
        err = mpmath.fsum(errs) + trunc + 4 * len(terms) * max(mags) * ctx.eps
        return BigReal(v, err)


def taylor_nmax(table: MomentTable, ctx: PrecisionContext = DEFAULT) -> int:
    """Largest n that dn_taylor accepts for this table."""
    n = 1
    while True:
        try:
            dn_taylor(n + 1, table, ctx)
        except RangeError:
            return n
        n += 1


# -- operator route ------------------------------------------------------------

def dn_operator(n: int, ctx: PrecisionContext = DEFAULT, spec: TransferOperatorSpec | None = None) -> BigReal:
    """d_n by iterating the GAUSS operator on cos(2 pi n y)."""
    return integrate(spec or TransferOperatorSpec(), cos_2pi(n), ctx)


def sine_channel(n: int, ctx: PrecisionContext = DEFAULT, spec: TransferOperatorSpec | None = None) -> BigReal:
    """int sin(2 pi n y) d?, which vanishes by symmetry."""
    return integrate(spec or TransferOperatorSpec(), sin_2pi(n), ctx)


FLOAT_OPERATOR = TransferOperatorSpec(dtype="float64", degree=64, max_degree=4096)


# -- Riemann-Stieltjes route ---------------------------------------------------

def dn_stieltjes(n: int, m: int = 22, ctx: PrecisionContext | None = None,
                 rule: Rule = Rule.MIDPOINT) -> BigReal:
    """Riemann-Stieltjes sum for d_n over the generation-m Farey cells.

    The returned err covers rounding only; the discretization error is not
    bounded (it is of order 2^-m n^2 for midpoint tags).
    """
    v = stieltjes_sum(cos_2pi(n), m, rule, ctx)
    return BigReal(v.value, None)


def trig_sums(x: np.ndarray, w: np.ndarray, nmax: int, bins: int | None = None) -> np.ndarray:
    """S[n] = sum_k w_k exp(2 pi i n x_k) for n = 0..nmax, x in [0, 1].

    Points are binned on a grid of G cells and each bin's offsets are
    expanded in a Taylor series, so the cost is a handful of FFTs of
    length G. Accuracy is about 1e-15 relative to sum |w|.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    G = bins or max(1 << 16, 1 << int(math.ceil(math.log2(64 * (nmax + 1)))))
    b = np.minimum((x * G).astype(np.int64), G - 1)
    delta = x - (b + 0.5) / G
    h = math.pi * nmax / G                  # bound on |2 pi n delta|
    P, c = 1, h
    while c > 1e-18:
        P += 1
        c *= h / P
    n = np.arange(nmax + 1)
    S = np.zeros(nmax + 1, dtype=complex)
    pw = w.copy()
    fact = 1.0
    for p in range(P):
        Mp = np.bincount(b, weights=pw, minlength=G)
        F = np.fft.ifft(Mp)[: nmax + 1] * G
        S += (2j * np.pi * n) ** p / fact * F
        pw = pw * delta
        fact *= p + 1
    return S * np.exp(1j * np.pi * n / G)


def dn_stieltjes_table(nmax: int, m: int = 22) -> np.ndarray:
    """Midpoint sums at generation m for all n <= nmax (float64)."""
    p, q = farey_arrays(m, max(m, DEPTH_CAP))
    x = p / q
    S = trig_sums(x, np.full(len(x), math.ldexp(1.0, -m)), nmax)
    return S.real


def dn_compound_table(nmax: int, Q: int = 8, theta: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """d_n for n <= nmax from the compound Gauss rule; returns (values, err).

    The error estimate is twice the discrepancy against a second,
    differently refined rule, plus a float64 floor.
    """
    x1, w1 = compound_points(nmax, Q, theta)
    d1 = trig_sums(x1, w1, nmax)
    del x1, w1
    x2, w2 = compound_points(nmax, Q + 2, theta * 1.5)
    d2 = trig_sums(x2, w2, nmax)
    err = 2 * np.abs(d1.real - d2.real) + 5e-14
    return d1.real, err


def coefficient_table(nmax: int, ctx: PrecisionContext = DEFAULT, taylor_max: int = 10,
                      operator_max: int = 200, table: MomentTable | None = None) -> CoefficientTable:
    """The default pipeline: TAYLOR for n <= 10, OPERATOR (float64) up to 200, STIELTJES beyond.

    The STIELTJES entries use the compound Gauss rule on refined Farey cells.
    """
    out = CoefficientTable(precision_bits=ctx.bits)
    if taylor_max:
        table = table or moments(260, ctx)
        for n in range(1, min(taylor_max, nmax) + 1):
            out.set(n, dn_taylor(n, table, ctx), Method.TAYLOR)
    for n in range(taylor_max + 1, min(operator_max, nmax) + 1):
        out.set(n, dn_operator(n, ctx, FLOAT_OPERATOR), Method.OPERATOR)
    if nmax > operator_max:
        vals, errs = dn_compound_table(nmax)
        for n in range(operator_max + 1, nmax + 1):
            out.set(n, BigReal(mpf(float(vals[n])), mpf(float(errs[n]))), Method.STIELTJES)
    return out


def stieltjes_coefficient_table(nmax: int, m: int | None = None) -> CoefficientTable:
    """All entries from Riemann-Stieltjes sums (compound rule, or midpoint at depth m)."""
    out = CoefficientTable(precision_bits=53)
    if m is None:
        vals, errs = dn_compound_table(nmax)
    else:
        vals, errs = dn_stieltjes_table(nmax, m), np.full(nmax + 1, np.nan)
    for n in range(1, nmax + 1):
        e = None if math.isnan(errs[n]) else mpf(float(errs[n]))
        out.set(n, BigReal(mpf(float(vals[n])), e), Method.STIELTJES)
    return out


# -- Weyl sums over the Farey tree ------------------------------------------------

@dataclass(frozen=True)
class WeylSum:
    n: int
    m: int
    real: float
    imag: float


def _chunk_sums(args):
    n, p, q = args
    ph = (2 * np.pi * n) * (p % q) / q
    return float(np.cos(ph).sum()), float(np.sin(ph).sum())


def weyl_sum(n: int, m: int, threads: int = 1, max_depth: int = 28) -> WeylSum:
    """2^-m sum_{p/q in generation m} exp(2 pi i n p/q).

    The tree is streamed in subtrees of fixed size; per-chunk sums are
    combined with math.fsum so the result does not depend on ``threads``.
    """
    if m > max_depth:
        raise ResourceError(f"generation {m} exceeds cap {max_depth}")
    chunks = ((n, p, q) for p, q in iter_farey(m, split=max(0, m - 18), max_depth=max_depth))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(_chunk_sums, chunks))
    else:
        parts = [_chunk_sums(c) for c in chunks]
    re = math.fsum(a for a, _ in parts)
    im = math.fsum(b for _, b in parts)
    return WeylSum(n, m, math.ldexp(re, -m), math.ldexp(im, -m))


# -- partial sums and bounds ---------------------------------------------------------

@dataclass(frozen=True)
class PartialSumStats:
    n: np.ndarray
    partial: np.ndarray          # sum_{i<=n} d_i
    omega: np.ndarray            # sum_{i<=n} |d_i|
    squares: np.ndarray          # sum_{i<=n} d_i^2
    cesaro: np.ndarray           # running mean of the partial sums

    @property
    def omega_ratio(self) -> np.ndarray:
        return self.omega / self.n ** (1 - ALPHA / 2)

    @property
    def wiener_ratio(self) -> np.ndarray:
        return self.squares / self.n ** (1 - ALPHA)


def partial_sum_stats(d: np.ndarray) -> PartialSumStats:
    """Statistics of d[1:], where d is an array indexed by n."""
    d = np.asarray(d[1:], dtype=float)
    n = np.arange(1, len(d) + 1, dtype=float)
    partial = np.cumsum(d)
    return PartialSumStats(n, partial, np.cumsum(np.abs(d)), np.cumsum(d * d), np.cumsum(partial) / n)


def phi_series(x: float, d: np.ndarray, nmax: int) -> float:
    """3/4 + sum_{n<=nmax} d^_n sin(2 pi n x) / (2 pi n), with the pure part summed in closed form.

    Uses sum_n sin(2 pi n x)/(2 pi n) = 1/4 - x/2 on (0, 1).
    """
    x = x - math.floor(x)
    n = np.arange(1, nmax + 1)
    s = np.sum(d[1:nmax + 1] * np.sin(2 * np.pi * n * x) / (2 * np.pi * n))
    return 0.75 + (0.25 - x / 2) - float(s)
