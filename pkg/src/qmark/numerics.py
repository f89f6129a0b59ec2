"""
Precision substrate: contexts, reals with error bounds, Bernoulli numbers,
even zeta values, the sine integral tail and the series sum 2^-n (log n)^r.
"""
from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf


@dataclass(frozen=True)
class PrecisionContext:
    bits: int = 256
    guard_bits: int = 64

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("bits must be >= 64")
        if self.guard_bits < 0:
            raise ValueError("guard_bits must be >= 0")

    @property
    def work_bits(self) -> int:
        return self.bits + self.guard_bits

    @property
    def eps(self) -> mpf:
        """Unit roundoff at the working precision."""
        return mpmath.ldexp(mpf(1), -self.work_bits)

    @property
    def tol(self) -> mpf:
        """Default target accuracy, 2**(-5 bits / 8)."""
        return mpmath.ldexp(mpf(1), -(5 * self.bits) // 8)

    @property
    def digits(self) -> int:
        return int(self.bits * math.log10(2))

    @contextmanager
    def workprec(self, extra: int = 0):
        with mpmath.workprec(self.work_bits + extra):
            yield

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.bits, self.guard_bits)


DEFAULT = PrecisionContext()


def _bits(*xs) -> int:
    """Precision needed to hold the given mpf values without rounding."""
    b = mpmath.mp.prec
    for x in xs:
        if isinstance(x, mpf):
            b = max(b, x._mpf_[3])
    return b


def _exact_mpf(x) -> mpf:
    if isinstance(x, mpf):
        return x
    if isinstance(x, Fraction):
        with mpmath.workprec(max(mpmath.mp.prec, 512)):
            return mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        with mpmath.workprec(max(mpmath.mp.prec, x.bit_length() + 1)):
            return mpf(x)
    return mpf(x)


def _err_add(*errs):
    if any(e is None for e in errs):
        return None
    return mpmath.fsum(errs)


@dataclass(frozen=True)
class BigReal:
    """A real value together with an absolute error bound (None if unknown)."""

    value: mpf
    err: mpf | None = None

    # values keep the precision they were computed at; arithmetic runs at
    # the larger of the current context and the operands' precision

    def __post_init__(self):
        object.__setattr__(self, "value", _exact_mpf(self.value))
        if self.err is not None:
            object.__setattr__(self, "err", abs(_exact_mpf(self.err)))

    @staticmethod
    def exact(v) -> "BigReal":
        return BigReal(mpf(v), mpf(0))

    def _lift(self, other):
        if isinstance(other, BigReal):
            return other
        return BigReal(other, 0)

    def __add__(self, other):
        o = self._lift(other)
        with mpmath.workprec(_bits(self.value, o.value)):
            v = self.value + o.value
            e = _err_add(self.err, o.err)
            return BigReal(v, None if e is None else e + abs(v) * mpmath.eps)

    __radd__ = __add__

    def __neg__(self):
        return BigReal(mpmath.mp.make_mpf((self.value._mpf_[0] ^ 1,) + self.value._mpf_[1:]) if self.value else self.value,
                       self.err)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        with mpmath.workprec(_bits(self.value, o.value)):
            v = self.value * o.value
            if self.err is None or o.err is None:
                return BigReal(v, None)
            e = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err + abs(v) * mpmath.eps
            return BigReal(v, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        with mpmath.workprec(_bits(self.value, o.value)):
            v = self.value / o.value
            if self.err is None or o.err is None:
                return BigReal(v, None)
            den = abs(o.value) - o.err
            if den <= 0:
                return BigReal(v, mpmath.inf)
            e = (self.err + abs(v) * o.err) / den + abs(v) * mpmath.eps
            return BigReal(v, e)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __abs__(self):
        return -self if self.value < 0 else self

    def __float__(self):
        return float(self.value)

    def with_err(self, extra) -> "BigReal":
        return BigReal(self.value, None if self.err is None else self.err + abs(_exact_mpf(extra)))

    def contains(self, x, slack=0) -> bool:
        if self.err is None:
            return False
        x = _exact_mpf(x)
        with mpmath.workprec(_bits(self.value, x)):
            return abs(self.value - x) <= self.err + slack

    def agrees(self, other: "BigReal") -> bool:
        o = self._lift(other)
        if self.err is None or o.err is None:
            return False
        with mpmath.workprec(_bits(self.value, o.value)):
            return abs(self.value - o.value) <= self.err + o.err

    def __repr__(self):
        e = "?" if self.err is None else mpmath.nstr(self.err, 3)
        return f"BigReal({mpmath.nstr(self.value, 25)} +/- {e})"


def fmt_decimal(x, digits: int) -> str:
    """Round to nearest with ``digits`` significant digits, no trimming."""
    x = _exact_mpf(x)
    if x == 0:
        return "0." + "0" * max(digits - 1, 0)
    with mpmath.workprec(int(digits * 3.33) + 40):
        s = mpmath.nstr(x, digits, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    return s


# -- Bernoulli numbers ---------------------------------------------------

_bern = [Fraction(1), Fraction(-1, 2)]
_bern_lock = threading.Lock()


def bernoulli(k: int) -> Fraction:
    """Exact B_k with B_1 = -1/2, from sum_{j<=k} C(k+1, j) B_j = 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k < len(_bern):
        return _bern[k]
    with _bern_lock:
        while len(_bern) <= k:
            n = len(_bern)
            if n % 2:
                _bern.append(Fraction(0))
                continue
            s = Fraction(0)
            c = 1
            for j in range(n):
                s += c * _bern[j]
                c = c * (n + 1 - j) // (j + 1)
            _bern.append(-s / (n + 1))
    return _bern[k]


def bernoulli_table(kmax: int) -> list[Fraction]:
    bernoulli(kmax)
    return _bern[: kmax + 1]


# -- even zeta values ------------------------------------------------------

def zeta_even(n: int, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """zeta(2n) from the Bernoulli closed form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with ctx.workprec():
        b = bernoulli(2 * n)
        v = (-1) ** (n + 1) * mpf(b.numerator) / b.denominator
        v = v * (2 * mpmath.pi) ** (2 * n) / (2 * mpmath.factorial(2 * n))
        return BigReal(v, 4 * v * ctx.eps)


def zeta_even_minus_one(n: int, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """zeta(2n) - 1 with relative accuracy, also for large n.

    For 2n > 40 the Dirichlet series sum_{k>=2} k^-2n is summed directly
    (it converges like 2^-2n); below that the closed form is evaluated
    with 2n extra bits so that the subtraction of 1 loses nothing.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if 2 * n <= 40:
        with ctx.workprec(2 * n + 8):
            z = zeta_even(n, PrecisionContext(ctx.bits + 2 * n + 8, ctx.guard_bits)).value
            v = z - 1
        with ctx.workprec():
            v = +v
            return BigReal(v, 4 * v * ctx.eps)
    with ctx.workprec():
        s = 2 * n
        target = ctx.eps * mpmath.ldexp(mpf(1), -s)
        terms = []
        k = 2
        while True:
            t = mpf(k) ** (-s)
            terms.append(t)
            # tail sum_{j>k} j^-s <= k^(1-s) / (s-1)
            tail = mpf(k) ** (1 - s) / (s - 1)
            if tail < target:
                break
            k += 1
        v = mpmath.fsum(terms)
        return BigReal(v, tail + 4 * v * ctx.eps)


# -- sine integral ---------------------------------------------------------

def _si_series(x: mpf, ctx: PrecisionContext) -> tuple[mpf, mpf]:
    # terms grow to about e^x before decaying; pay for it in guard bits
    guard = int(float(x) * 1.4427) + 16
    with ctx.workprec(guard):
        x = mpf(x)
        x2 = x * x
        term = x
        s = x
        k = 0
        tiny = ctx.eps * mpmath.ldexp(mpf(1), -4)
        while True:
            k += 1
            term = -term * x2 / ((2 * k) * (2 * k + 1))
            c = term / (2 * k + 1)
            s += c
            if abs(c) < tiny and 2 * k > x:
                break
        return s, 8 * ctx.eps


def _si_tail_asymptotic(x: mpf, ctx: PrecisionContext) -> tuple[mpf, mpf] | None:
    """pi/2 - Si(x) = f(x) cos x + g(x) sin x via the asymptotic series.

    The remainder of both auxiliary series is bounded by the first
    omitted term. Returns None if the series cannot reach the target.
    """
    with ctx.workprec():
        x = mpf(x)
        ix2 = 1 / (x * x)
        target = ctx.eps
        f_sum, g_sum = mpf(0), mpf(0)
        tf = 1 / x              # (2k)! / x^(2k+1) with sign
        tg = ix2                # (2k+1)! / x^(2k+2) with sign
        k = 0
        while True:
            f_sum += tf
            g_sum += tg
            nf = -tf * (2 * k + 1) * (2 * k + 2) * ix2
            ng = -tg * (2 * k + 2) * (2 * k + 3) * ix2
            k += 1
            if abs(nf) + abs(ng) < target:
                rem = abs(nf) + abs(ng)
                break
            if abs(nf) > abs(tf):
                return None
            tf, tg = nf, ng
        v = f_sum * mpmath.cos(x) + g_sum * mpmath.sin(x)
        return v, rem + 4 * ctx.eps


def si_split(ctx: PrecisionContext) -> float:
    """Argument above which the asymptotic series reaches working precision."""
    return max(40.0, ctx.work_bits * math.log(2) + 8)


def sine_integral_tail(a, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """int_a^inf sin(2 pi y) / y dy = pi/2 - Si(2 pi a) for a > 0."""
    with ctx.workprec():
        a = mpf(a)
        if a <= 0:
            raise ValueError("a must be positive")
        x = 2 * mpmath.pi * a
        if x >= si_split(ctx):
            r = _si_tail_asymptotic(x, ctx)
            if r is not None:
                return BigReal(r[0], r[1])
        s, e = _si_series(x, ctx)
        v = mpmath.pi / 2 - s
        return BigReal(v, e * max(1, abs(x)))


def si(x, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """Si(x) for real x."""
    with ctx.workprec():
        x = mpf(x)
        if x == 0:
            return BigReal.exact(0)
        sgn = 1 if x > 0 else -1
        t = sine_integral_tail(abs(x) / (2 * mpmath.pi), ctx)
        return BigReal(sgn * (mpmath.pi / 2 - t.value), t.err)


# -- sum_n 2^-n (log n)^r --------------------------------------------------

def twopow_log_series(r: int, ctx: PrecisionContext = DEFAULT, terms: int | None = None) -> BigReal:
    """sum_{n>=1} 2^-n (log n)^r; ``terms`` truncates to a partial sum."""
    if r < 1:
        raise ValueError("r must be >= 1")
    with ctx.workprec():
        acc = []
        n = 1
        tail = mpf(0)
        while True:
            t = mpmath.ldexp(mpmath.log(n) ** r, -n)
            acc.append(t)
            if terms is not None:
                if n >= terms:
                    return BigReal(mpmath.fsum(acc), 4 * n * ctx.eps)
            elif n > 2:
                q = (mpmath.log(n + 1) / mpmath.log(n)) ** r / 2
                if q < 1:
                    tail = t * q / (1 - q)
                    if tail < ctx.eps:
                        break
            n += 1
        return BigReal(mpmath.fsum(acc), tail + 4 * n * ctx.eps)
