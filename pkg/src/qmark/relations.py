"""
Numerical checks of linear identities satisfied by the coefficients d_n.

Every check computes an error budget from its inputs before looking at
the residual; ``passed`` is derived from the two.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mpf

from .exact import question_mark
from .fourier import ALPHA, CoefficientTable, trig_sums
from .measure import MomentTable, moments
from .numerics import DEFAULT, BigReal, PrecisionContext, sine_integral_tail, twopow_log_series, zeta_even
from .zeta import m_even, m_one


@dataclass(frozen=True)
class RelationReport:
    name: str
    residual: mpf
    budget: mpf
    params: dict = field(default_factory=dict)
    precision_bits: int = 256
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.budget

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": mpmath.nstr(self.residual, 6),
                "budget": mpmath.nstr(self.budget, 6), "pass": self.passed,
                "params": self.params, "precision_bits": self.precision_bits}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _err(b: BigReal) -> mpf:
    return mpf(2) if b.err is None else b.err


# -- the r = 1 identity ---------------------------------------------------------

def geometric_sine(y, ctx: PrecisionContext = DEFAULT) -> tuple[mpf, mpf]:
    """(sum_K 2^-K sin(2 pi K y), 2 sin(2 pi y) / (5 - 4 cos(2 pi y)))."""
    with ctx.workprec():
        y = mpf(y)
        terms = [mpmath.ldexp(mpmath.sin(2 * mpmath.pi * K * y), -K) for K in range(1, ctx.work_bits + 2)]
        s = mpmath.sinpi(2 * y)
        return mpmath.fsum(terms), 2 * s / (5 - 4 * mpmath.cospi(2 * y))


def oscillatory_tail(n: int, ctx: PrecisionContext = DEFAULT, tol=None) -> BigReal:
    """J_n = int_n^inf sin(2 pi x) / (5 - 4 cos(2 pi x)) dx / x.

    Uses J_n = 1/2 sum_K 2^-K int_{nK}^inf sin(2 pi y) dy / y, truncated
    once 2^-K / (2 pi n K) falls below tol.
    """
    tol = ctx.eps if tol is None else mpf(tol)
    with ctx.workprec():
        terms, err = [], mpf(0)
        K = 1
        while True:
            s = sine_integral_tail(n * K, ctx)
            terms.append(mpmath.ldexp(s.value, -K))
            err += mpmath.ldexp(s.err, -K)
            bound = mpmath.ldexp(mpf(1), -K) / (2 * mpmath.pi * n * K)
            if bound < tol:
                break
            K += 1
        return BigReal(mpmath.fsum(terms) / 2, (err + bound) / 2)


def _asym_coeffs(J: int, ctx: PrecisionContext) -> list[mpf]:
    """c_j with J_n/(pi n) ~ sum_j c_j n^(-2j-2)."""
    with ctx.workprec():
        return [(-1) ** j * mpmath.factorial(2 * j) * mpmath.polylog(2 * j + 1, mpf(1) / 2)
                / (2 * mpmath.pi) ** (2 * j + 2) for j in range(J)]


def check_r1(coefficients: CoefficientTable, ctx: PrecisionContext = DEFAULT, N0: int | None = None,
             J: int = 4, table: MomentTable | None = None, target: float = 1e-10) -> RelationReport:
    """3/4 sum 2^-n log n - 1/4 log 2 pi - M(1)/4 - sum (1 - d_n) J_n / (pi n) = 0.

    The last series is split as

        sum_{n<=N0} (1 - d_n) (J_n/(pi n) - P(n)) + sum_j c_j (zeta(2j+2) - M(2j+2)),

    where P(n) = sum_{j<J} c_j n^(-2j-2) is the large-n expansion of
    J_n/(pi n); the omitted n > N0 part of the first sum is bounded by the
    expansion's remainder (2J)! Li_{2J+1}(1/2) / ((2 pi)^(2J+2) n^(2J+2)).
    """
    # a short table shows up as a larger truncation term, not as an error
    N0 = min(N0 or 100, coefficients.nmax)
    table = table or moments(260, ctx)
    with ctx.workprec():
        c = _asym_coeffs(J, ctx)
        rem_c = mpmath.factorial(2 * J) * mpmath.polylog(2 * J + 1, mpf(1) / 2) / (2 * mpmath.pi) ** (2 * J + 2)
        t1 = twopow_log_series(1, ctx)
        t2 = -mpmath.log(2 * mpmath.pi) / 4
        M1 = m_one(table, ctx)
        jtol = mpf(target) * mpf(10) ** -6
        body, body_err = [], mpf(0)
        for n in range(1, N0 + 1):
            Jn = oscillatory_tail(n, ctx, tol=jtol * n)
            P = mpmath.fsum(c[j] * mpf(n) ** (-2 * j - 2) for j in range(J))
            br = Jn.value / (mpmath.pi * n) - P
            d = coefficients[n]
            body.append((1 - d.value) * br)
            body_err += abs(br) * _err(d) + 2 * Jn.err / (mpmath.pi * n)
        back, back_err = [], mpf(0)
        for j in range(J):
            z = zeta_even(j + 1, ctx)
            Mv = m_even(j + 1, table, ctx)
            back.append(c[j] * (z.value - Mv.value))
            back_err += abs(c[j]) * (z.err + Mv.err)
        tail = 2 * rem_c * mpf(N0) ** (-2 * J - 1) / (2 * J + 1)
        t4 = -(mpmath.fsum(body) + mpmath.fsum(back))
        residual = t1.value * 3 / 4 + t2 - M1.value / 4 + t4
        budget = (t1.err * 3 / 4 + M1.err / 4 + body_err + back_err + tail
                  + 64 * N0 * ctx.eps)
        return RelationReport(
            "r1", residual, budget, {"N0": N0, "J": J}, ctx.bits,
            {"sum_2pow_log": t1.value * 3 / 4, "log2pi": t2, "M1_quarter": -M1.value / 4,
             "oscillatory": t4, "tail": tail})


# -- the Fourier series of ?(x) - x --------------------------------------------------

def omega_constant(d: np.ndarray, nmin: int = 10) -> float:
    nmin = min(nmin, len(d) - 1)
    """max_{nmin <= n <= nmax} Omega(n) / n^(1 - alpha/2)."""
    om = np.cumsum(np.abs(d[1:]))
    n = np.arange(1, len(om) + 1)
    return float(np.max(om[nmin - 1:] / n[nmin - 1:] ** (1 - ALPHA / 2)))


def abs_tail_envelope(N: int, C: float) -> float:
    """Bound for sum_{n>N} |d_n| / n when Omega(n) <= C n^(1 - alpha/2)."""
    return 2 * C / ALPHA * N ** (-ALPHA / 2)


def check_trig(x, nmax: int, coefficients: CoefficientTable, ctx: PrecisionContext = DEFAULT) -> RelationReport:
    """?(x) - x = sum d_n sin(2 pi n x) / (pi n) at a rational x in [0, 1]."""
    x = Fraction(x)
    d = coefficients.array(nmax)
    e = coefficients.errors(nmax)
    with ctx.workprec():
        lhs = question_mark(x).to_fraction() - x
        lhs = mpf(lhs.numerator) / lhs.denominator
        terms = []
        for n in range(1, nmax + 1):
            r = (n * x) % 1
            s = mpmath.sinpi(2 * mpf(r.numerator) / r.denominator)
            terms.append(coefficients[n].value * s / (mpmath.pi * n))
        rhs = mpmath.fsum(terms)
        residual = lhs - rhs
    C = omega_constant(d)
    n = np.arange(1, nmax + 1)
    budget = abs_tail_envelope(nmax, C) / math.pi + float(np.sum(e[1:] / (math.pi * n))) + 1e-15 * nmax
    if x.denominator <= 2:
        # both sides vanish termwise
        budget = float(np.sum(e[1:] / (math.pi * n))) + 1e-15 * nmax
    return RelationReport("trig", residual, mpf(budget), {"x": str(x), "nmax": nmax, "C_omega": C}, ctx.bits)


SPECIALIZATIONS = {
    "third": lambda: -mpmath.pi / (6 * mpmath.sqrt(3)),
    "quarter": lambda: -mpmath.pi / 8,
    "sixth": lambda: -13 * mpmath.pi / (48 * mpmath.sqrt(3)),
}


def specialization_sums(d: np.ndarray, nmax: int) -> dict[str, float]:
    """Partial sums over indices <= nmax of the x = 1/3, 1/4, 1/6 series."""
    k = np.arange(1, nmax + 1)
    t = d[1:nmax + 1] / k
    r3 = k % 3
    third = math.fsum(np.where(r3 == 1, t, 0).tolist()) - math.fsum(np.where(r3 == 2, t, 0).tolist())
    odd = k % 2 == 1
    sgn4 = np.where(((k - 1) // 2) % 2 == 0, 1.0, -1.0)
    quarter = math.fsum(np.where(odd, sgn4 * t, 0).tolist())
    sgn6 = np.where(((k - 1) // 3) % 2 == 0, 1.0, -1.0)
    sixth = math.fsum(np.where(r3 != 0, sgn6 * t, 0).tolist())
    return {"third": third, "quarter": quarter, "sixth": sixth}


def check_specializations(nmax: int, coefficients: CoefficientTable,
                          ctx: PrecisionContext = DEFAULT) -> list[RelationReport]:
    """The three constants obtained from the series at x = 1/3, 1/4, 1/6."""
    d = coefficients.array(nmax)
    e = coefficients.errors(nmax)
    sums = specialization_sums(d, nmax)
    C = omega_constant(d)
    n = np.arange(1, nmax + 1)
    budget = abs_tail_envelope(nmax, C) + float(np.sum(e[1:] / n)) + 1e-15 * nmax
    out = []
    with ctx.workprec():
        for name, const in SPECIALIZATIONS.items():
            target = const()
            out.append(RelationReport(f"spec_{name}", mpf(sums[name]) - target, mpf(budget),
                                      {"nmax": nmax, "target": mpmath.nstr(target, 20)}, ctx.bits))
    return out


# -- the relation with cos(2 pi m / x) -----------------------------------------------

def taper(t: np.ndarray) -> np.ndarray:
    """C-infinity cutoff: 1 on [0, 1/2], 0 on [1, inf)."""
    t = np.asarray(t, dtype=float)
    u = np.clip(2 * t - 1, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1 / np.where(u > 0, u, 1)), 0.0)
        b = np.where(u < 1, np.exp(-1 / np.where(u < 1, 1 - u, 1)), 0.0)
    return np.where(u <= 0, 1.0, np.where(u >= 1, 0.0, b / (a + b)))


def _panels(m: int, N: int, U: int, order: int = 16):
    """Gauss-Legendre nodes on [1/U, 1] fine enough for cos(2 pi m / x) and cos(2 pi N x)."""
    gx, gw = np.polynomial.legendre.leggauss(order)
    br = [1.0 / U]
    x = br[0]
    hmax = 0.5 / N
    while x < 1:
        h = min(hmax, 0.5 * x * x / m)
        x = min(1.0, x + h)
        br.append(x)
    br = np.array(br)
    a, b = br[:-1], br[1:]
    mid, half = (a + b) / 2, (b - a) / 2
    X = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    W = (half[:, None] * gw[None, :]).ravel()
    return X, W


def cr_kernels(m: int, N: int, U: int = 2000) -> tuple[np.ndarray, float]:
    """K[n] = int_0^1 cos(2 pi n x) cos(2 pi m / x) dx for n = 0..N and a tail error bound.

    [1/U, 1] is done by Gauss-Legendre panels; on [0, 1/U] the substitution
    u = 1/x and two integrations by parts give -phi'(U) / (2 pi m)^2 with
    phi(u) = cos(2 pi n / u) / u^2 (U is an integer).
    """
    X, W = _panels(m, N, U)
    g = W * np.cos(2 * np.pi * m / X)
    K = trig_sums(X, g, N).real
    n = np.arange(N + 1)
    om = 2 * np.pi * m
    arg = 2 * np.pi * n / U
    dphi = 2 * np.pi * n * np.sin(arg) / U ** 4 - 2 * np.cos(arg) / U ** 3
    K += -dphi / om ** 2
    # next term of the expansion bounds the remainder
    d3 = ((2 * np.pi * n) ** 3 / U ** 8 + 24 * (2 * np.pi * n) ** 2 / U ** 7
          + 36 * 2 * np.pi * n / U ** 6 + 24 / U ** 5)
    return K, float(np.max(d3) / om ** 4) + 1e-14


def cr_direct_integral(m: int, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """int_0^1 cos(2 pi m / x) dx = 1 - 2 pi m int_m^inf sin(2 pi y) / y dy."""
    s = sine_integral_tail(m, ctx)
    with ctx.workprec():
        return BigReal(1 - 2 * mpmath.pi * m * s.value, 2 * mpmath.pi * m * s.err)


def cr_series(m: int, N: int, coefficients: CoefficientTable, U: int = 2000) -> tuple[float, float, float]:
    """(I_0 + 2 sum chi(n/N) d_n K_{n,m}, quadrature value of I_0, data error bound)."""
    d = coefficients.array(N)
    e = coefficients.errors(N)
    K, kerr = cr_kernels(m, N, U)
    chi = taper(np.arange(N + 1) / N)
    s = 2 * math.fsum((chi[1:] * d[1:] * K[1:]).tolist())
    derr = 2 * float(np.sum(chi[1:] * (e[1:] * np.abs(K[1:]) + kerr)))
    return s, float(K[0]), derr


def check_cr(m: int, coefficients: CoefficientTable, N: int | None = None,
             ctx: PrecisionContext = DEFAULT) -> RelationReport:
    """d_m = int cos(2 pi m/x) dx + 2 sum d_n int cos(2 pi n x) cos(2 pi m/x) dx.

    The series is summed with the smooth cutoff chi(n/N); the budget takes
    the change from N/2 to N as the cutoff error, plus propagated data and
    quadrature errors.
    """
    if m < 1 or m > 5:
        raise ValueError("m must be in 1..5")
    N = N or coefficients.nmax
    I0 = cr_direct_integral(m, ctx)
    s_full, I0_quad, derr = cr_series(m, N, coefficients)
    s_half, _, _ = cr_series(m, N // 2, coefficients)
    dm = coefficients[m]
    residual = float(dm.value) - (float(I0.value) + s_full)
    budget = abs(s_full - s_half) + derr + float(_err(dm)) + abs(I0_quad - float(I0.value)) + 1e-13
    return RelationReport(f"cr_m{m}", mpf(residual), mpf(budget),
                          {"m": m, "N": N}, ctx.bits,
                          {"I0": float(I0.value), "I0_quadrature": I0_quad, "series": s_full, "series_half": s_half})


def report_json(reports: list[RelationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=1)
