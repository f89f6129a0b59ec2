"""
Correlation sums of the Minkowski measure on the uniform N-partition.

Gaps Delta_i = ?((i+1)/N) - ?(i/N) are integers scaled by 2^P, so every
sum below is an exact integer (up to the 2^-P truncation of ?), and the
result is the same for any chunking or worker count.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mpf

from .exact import ResourceError, question_mark_fixed
from .fourier import ALPHA
from .numerics import DEFAULT, BigReal, PrecisionContext

N_CAP = 10 ** 7
CHUNK = 1 << 16


@dataclass(frozen=True)
class ConvolutionSample:
    N: int
    beta: mpf
    sum_value: BigReal
    scaled: mpf

    def __post_init__(self):
        if self.sum_value.value < 0:
            raise ValueError("correlation sums are non-negative")


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r2: float
    N_list: list = field(default_factory=list)

    @property
    def below_lipschitz(self) -> bool:
        return self.slope < 1 - 2 * ALPHA

    @property
    def conjecture_consistent(self) -> bool:
        return -1.25 < self.slope < -0.85

    def to_json(self) -> str:
        return json.dumps({"slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                           "N_list": list(self.N_list), "below_lipschitz": self.below_lipschitz,
                           "conjecture_consistent": self.conjecture_consistent}, sort_keys=True)


def _check_N(N: int):
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > N_CAP:
        raise ResourceError(f"N = {N} exceeds the cap {N_CAP}")


def _chunks(N: int):
    return [(lo, min(lo + CHUNK, N)) for lo in range(0, N, CHUNK)]


def _map(fn, tasks, threads: int):
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(threads) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _gaps_chunk(args) -> list[int]:
    lo, hi, N, P = args
    prev = question_mark_fixed(lo, N, P)
    out = []
    for i in range(lo + 1, hi + 1):
        v = question_mark_fixed(i, N, P)
        out.append(v - prev)
        prev = v
    return out


def _sq_chunk(args) -> int:
    return sum(g * g for g in _gaps_chunk(args))


def gaps(N: int, ctx: PrecisionContext = DEFAULT, threads: int = 1) -> list[int]:
    """[2^P Delta_i for i < N] with P = ctx.work_bits."""
    _check_N(N)
    P = ctx.work_bits
    parts = _map(_gaps_chunk, [(lo, hi, N, P) for lo, hi in _chunks(N)], threads)
    return [g for part in parts for g in part]


def _to_real(num: int, P2: int, err_units: int) -> BigReal:
    return BigReal(mpmath.ldexp(mpf(num), -P2), mpmath.ldexp(mpf(err_units), -P2))


def sigma_sum(N: int, ctx: PrecisionContext = DEFAULT, threads: int = 1) -> ConvolutionSample:
    """Sigma(N) = sum_i Delta_i^2."""
    _check_N(N)
    P = ctx.work_bits
    with ctx.workprec():
        parts = _map(_sq_chunk, [(lo, hi, N, P) for lo, hi in _chunks(N)], threads)
        tot = sum(parts)
        # each gap is within 2 units; sum of gaps is 2^P
        err = 8 * (1 << P) + 4 * N
        s = _to_real(tot, 2 * P, err)
        return ConvolutionSample(N, mpf(1), s, N * s.value)


def correlation(g: list[int], k: int) -> int:
    """sum_i g[i] g[k - 1 - i] over valid indices (k = beta N)."""
    N = len(g)
    lo, hi = max(0, k - N), min(N, k)
    if lo >= hi:
        return 0
    a = np.array(g[lo:hi], dtype=object)
    b = np.array(g[k - hi:k - lo][::-1], dtype=object)
    return int(np.dot(a, b))


def c_beta(K: int, N: int, ctx: PrecisionContext = DEFAULT, threads: int = 1,
           g: list[int] | None = None) -> list[ConvolutionSample]:
    """N times the correlation sum at beta = j/K, j = 0..2K; K must divide N."""
    if K < 1 or N % K:
        raise ValueError("grid size K must divide N")
    g = g if g is not None else gaps(N, ctx, threads)
    P = ctx.work_bits
    out = []
    with ctx.workprec():
        for j in range(2 * K + 1):
            k = j * (N // K)
            s = _to_real(correlation(g, k), 2 * P, 8 * (1 << P) + 4 * N)
            out.append(ConvolutionSample(N, mpf(j) / K, s, N * s.value))
    return out


def symmetry_defect(samples: list[ConvolutionSample], exclude: float = 0.1) -> float:
    """max |C(beta) - C(2 - beta)| / C(beta) over |beta - 1| >= exclude and C > 0."""
    by = {s.beta: s.scaled for s in samples}
    worst = 0.0
    for s in samples:
        r = 2 - s.beta
        if abs(s.beta - 1) < exclude or r not in by or s.scaled == 0:
            continue
        worst = max(worst, float(abs(s.scaled - by[r]) / s.scaled))
    return worst


def histogram(N: int, ctx: PrecisionContext = DEFAULT, threads: int = 1) -> list[tuple[int, float]]:
    """(i, N Delta_i): the density of d? on the uniform partition."""
    P = ctx.work_bits
    return [(i, N * math.ldexp(v, -P)) for i, v in enumerate(gaps(N, ctx, threads))]


def fit_exponent(samples: list[ConvolutionSample]) -> ExponentFit:
    """Least-squares line through (log N, log Sigma(N))."""
    Ns = [s.N for s in samples]
    if len(Ns) < 6 or max(Ns) < 1000 * min(Ns):
        raise ValueError("need >= 6 values of N spanning >= 3 decades")
    x = np.log(np.array(Ns, dtype=float))
    y = np.array([float(mpmath.log(s.sum_value.value)) for s in samples])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    r2 = 1 - float(resid @ resid) / float(((y - y.mean()) ** 2).sum())
    return ExponentFit(float(slope), float(intercept), r2, Ns)


def default_n_list() -> list[int]:
    return [10 ** e * f for e in range(3, 7) for f in (1, 3)] + [10 ** 7]


def to_csv(samples: list[ConvolutionSample], fh, digits: int = 30):
    from .numerics import fmt_decimal
    w = csv.writer(fh)
    w.writerow(["N", "beta", "sum", "scaled"])
    for s in samples:
        w.writerow([s.N, fmt_decimal(s.beta, 6), fmt_decimal(s.sum_value.value, digits),
                    fmt_decimal(s.scaled, digits)])
