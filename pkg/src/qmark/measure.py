"""
Quadrature against the Minkowski measure d?.

The workhorse is a Chebyshev collocation of the transfer operator

    (T f)(t) = sum_{a>=1} 2^-a f(1 / (a + t)),

which preserves integrals against d? and contracts towards constants
(second eigenvalue about -0.2555). The Farey operator

    (T f)(x) = f(x / (x + 1)) / 2 + f(1 / (x + 1)) / 2

is available as a cross-check. Functions are passed as callables
``f(y, xp)`` acting elementwise on an array ``y``; ``xp`` supplies
``pi``, ``cos``, ``sin``, ``log``, ``log1p`` and ``exp`` for the active
number type (numpy float64 or gmpy2 mpfr object arrays).
"""
from __future__ import annotations

import csv
import enum
import math
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import gmpy2
import mpmath
from mpmath.libmp import from_man_exp
import numpy as np
from mpmath import mpf

from .exact import DEPTH_CAP, ResourceError, farey_arrays, farey_partition
from .numerics import DEFAULT, BigReal, PrecisionContext, fmt_decimal


class ResolutionError(RuntimeError):
    """Chebyshev degree too low for the requested tolerance."""


class ConvergenceError(RuntimeError):
    """Operator iteration did not settle within max_iters."""


class OperatorKind(enum.Enum):
    FAREY = "farey"
    GAUSS = "gauss"


class Rule(enum.Enum):
    LEFT = "left"
    MIDPOINT = "midpoint"


# -- number backends ---------------------------------------------------------

class _Float:
    name = "float64"
    dtype = np.float64
    pi = math.pi
    cos = staticmethod(np.cos)
    sin = staticmethod(np.sin)
    log = staticmethod(np.log)
    log1p = staticmethod(np.log1p)
    exp = staticmethod(np.exp)
    eps = 2.0 ** -52

    def scalar(self, x):
        return float(x)

    def array(self, xs):
        return np.asarray(xs, dtype=np.float64)

    def to_mpf(self, x):
        return mpf(float(x))

    def context(self):
        return _nullctx()

    def pow2(self, k):
        return math.ldexp(1.0, k)


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


class _MP:
    name = "mp"
    dtype = object

    def __init__(self, prec: int):
        self.prec = prec
        with self.context():
            self.pi = gmpy2.const_pi()
            self.eps = gmpy2.mul_2exp(gmpy2.mpfr(1), -prec)
        self.cos = np.frompyfunc(gmpy2.cos, 1, 1)
        self.sin = np.frompyfunc(gmpy2.sin, 1, 1)
        self.log = np.frompyfunc(gmpy2.log, 1, 1)
        self.log1p = np.frompyfunc(gmpy2.log1p, 1, 1)
        self.exp = np.frompyfunc(gmpy2.exp, 1, 1)

    def context(self):
        return gmpy2.context(gmpy2.get_context(), precision=self.prec)

    def scalar(self, x):
        if isinstance(x, mpmath.mpf):
            man, exp = x.man_exp
            return gmpy2.mul_2exp(gmpy2.mpfr(int(man)), int(exp))
        return gmpy2.mpfr(x)

    def array(self, xs):
        out = np.empty(len(xs), dtype=object)
        for i, x in enumerate(xs):
            out[i] = self.scalar(x)
        return out

    def to_mpf(self, x):
        if not gmpy2.is_finite(x):
            return mpf(float(x))
        if x == 0:
            return mpf(0)
        man, exp = x.as_mantissa_exp()
        # exact: no rounding to the ambient mpmath precision
        return mpmath.mp.make_mpf(from_man_exp(int(man), int(exp)))

    def pow2(self, k):
        return gmpy2.mul_2exp(gmpy2.mpfr(1), k)


def backend(dtype: str, ctx: PrecisionContext = DEFAULT):
    return _Float() if dtype == "float64" else _MP(ctx.work_bits)


# -- function library --------------------------------------------------------

def cos_2pi(n) -> Callable:
    """y -> cos(2 pi n y)."""
    def f(y, xp):
        return xp.cos((2 * n) * xp.pi * y)
    f.sup = 1
    return f


def sin_2pi(n) -> Callable:
    def f(y, xp):
        return xp.sin((2 * n) * xp.pi * y)
    f.sup = 1
    return f


def power(L: int) -> Callable:
    def f(y, xp):
        return y ** L
    f.sup = 1
    return f


def reflected_power(L: int) -> Callable:
    """y -> (1 - y)^L; same d?-integral as y^L by symmetry."""
    def f(y, xp):
        return (1 - y) ** L
    f.sup = 1
    return f


def log1p_fn() -> Callable:
    def f(y, xp):
        return xp.log1p(y)
    f.sup = math.log(2)
    return f


def log_fn() -> Callable:
    """log y, singular at 0; use log_preimage for quadrature."""
    def f(y, xp):
        return xp.log(y)
    f.sup = None
    return f


# -- Chebyshev grid ------------------------------------------------------------

def lobatto_nodes(D: int, xp) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev-Lobatto nodes t_j = (1 - cos(pi j / D)) / 2 and barycentric weights."""
    with xp.context():
        if xp.name == "float64":
            j = np.arange(D + 1)
            t = (1 - np.cos(np.pi * j / D)) / 2
            t[0], t[D] = 0.0, 1.0
            if D % 2 == 0:
                t[D // 2] = 0.5
            lam = (-1.0) ** j
        else:
            t = np.empty(D + 1, dtype=object)
            lam = np.empty(D + 1, dtype=object)
            for j in range(D + 1):
                t[j] = (1 - gmpy2.cos(xp.pi * j / D)) / 2
                lam[j] = gmpy2.mpfr((-1) ** j)
            t[0], t[D] = gmpy2.mpfr(0), gmpy2.mpfr(1)
            if D % 2 == 0:
                t[D // 2] = gmpy2.mpfr(1) / 2
        lam[0] = lam[0] / 2
        lam[D] = lam[D] / 2
    return t, lam


def interp_rows(y: np.ndarray, t: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Barycentric interpolation matrix R with R @ values = interpolant(y)."""
    d = y[:, None] - t[None, :]
    hit = np.asarray(d == 0, dtype=bool)
    if hit.any():
        d = d.copy()
        d[hit] = 1
    c = lam[None, :] / d
    R = c / c.sum(axis=1)[:, None]
    rows = hit.any(axis=1)
    if rows.any():
        R[rows] = 0
        R[hit] = 1
    return R


def _cheb_matrix(D: int, xp) -> np.ndarray:
    """V with V @ nodal_values = Chebyshev coefficients in x = 1 - 2t."""
    with xp.context():
        n = D + 1
        if xp.name == "float64":
            j = np.arange(n)
            V = np.cos(np.pi * np.outer(j, j) / D) * (2.0 / D)
        else:
            V = np.empty((n, n), dtype=object)
            cosv = [gmpy2.cos(xp.pi * k / D) for k in range(2 * D)]
            two_d = gmpy2.mpfr(2) / D
            for k in range(n):
                for j in range(n):
                    V[k, j] = cosv[(j * k) % (2 * D)] * two_d
        V[:, 0] = V[:, 0] / 2
        V[:, D] = V[:, D] / 2
        V[0, :] = V[0, :] / 2
        V[D, :] = V[D, :] / 2
    return V


@dataclass
class ChebyshevFn:
    """Nodal representation of a function on [0, 1] at Chebyshev-Lobatto nodes.

    ``exact`` keeps the defining callable, if any, so that operators can
    evaluate it off the grid instead of interpolating.
    """

    values: np.ndarray
    exact: Callable | None = None
    xp: object = field(default_factory=_Float, repr=False)

    @property
    def degree(self) -> int:
        return len(self.values) - 1

    @cached_property
    def nodes(self):
        return lobatto_nodes(self.degree, self.xp)

    @cached_property
    def coeffs(self) -> np.ndarray:
        with self.xp.context():
            return _cheb_matrix(self.degree, self.xp) @ self.values

    def tail(self):
        """Size of the trailing Chebyshev coefficients (interpolation error proxy)."""
        c = self.coeffs
        D = self.degree
        k0 = max(1, D - 3)
        return 4 * max(abs(x) for x in c[k0:])

    def __call__(self, y):
        t, lam = self.nodes
        with self.xp.context():
            y = np.atleast_1d(np.asarray(y, dtype=self.xp.dtype))
            return interp_rows(y, t, lam) @ self.values

    @classmethod
    def from_callable(cls, f: Callable, degree: int, dtype: str = "float64",
                      ctx: PrecisionContext = DEFAULT) -> "ChebyshevFn":
        xp = backend(dtype, ctx)
        t, _ = lobatto_nodes(degree, xp)
        with xp.context():
            v = f(t, xp)
        obj = cls(np.asarray(v, dtype=xp.dtype), f, xp)
        obj.__dict__["nodes"] = lobatto_nodes(degree, xp)
        return obj


# -- operator engine -----------------------------------------------------------

@dataclass(frozen=True)
class TransferOperatorSpec:
    kind: OperatorKind = OperatorKind.GAUSS
    branch_cap: int | None = None       # GAUSS only; None -> ctx.bits
    degree: int = 64
    max_iters: int = 2000
    tol: float | None = None            # None -> ctx.tol
    adaptive: bool = True
    max_degree: int = 512
    dtype: str = "mp"                   # "mp" or "float64"

    def __post_init__(self):
        if self.degree < 4:
            raise ValueError("degree must be >= 4")
        if self.branch_cap is not None and self.branch_cap < 1:
            raise ValueError("branch_cap must be >= 1")

    def cap(self, ctx: PrecisionContext) -> int:
        if self.branch_cap is not None:
            return self.branch_cap
        return 60 if self.dtype == "float64" else ctx.bits

    def tolerance(self, ctx: PrecisionContext):
        if self.tol is not None:
            return mpf(self.tol)
        if self.dtype == "float64":
            return mpf(2) ** -36
        return ctx.tol

    def with_degree(self, D: int) -> "TransferOperatorSpec":
        return TransferOperatorSpec(self.kind, self.branch_cap, D, self.max_iters,
                                    self.tol, self.adaptive, self.max_degree, self.dtype)


class _Engine:
    """Collocated operator matrix and invariant functional at a fixed degree."""

    def __init__(self, kind: OperatorKind, D: int, A: int, xp):
        self.kind, self.D, self.A, self.xp = kind, D, A, xp
        self.t, self.lam = lobatto_nodes(D, xp)
        self._lock = threading.Lock()

    def branch_points(self):
        """Yield (weight, y-array) for every branch, the last one GAUSS's tail."""
        xp, t = self.xp, self.t
        if self.kind is OperatorKind.FAREY:
            half = xp.pow2(-1)
            yield half, t / (t + 1)
            yield half, 1 / (t + 1)
            return
        for a in range(1, self.A + 1):
            yield xp.pow2(-a), 1 / (t + a)
        zero = np.zeros_like(t) if xp.name == "float64" else np.array([gmpy2.mpfr(0)] * len(t), dtype=object)
        yield xp.pow2(-self.A), zero

    @cached_property
    def matrix(self) -> np.ndarray:
        with self.xp.context():
            M = None
            for w, y in self.branch_points():
                R = interp_rows(y, self.t, self.lam) * w
                M = R if M is None else M + R
            return M

    @cached_property
    def weights(self) -> np.ndarray:
        """w with w M = w and sum(w) = 1."""
        with self.xp.context():
            n = self.D + 1
            B = (-self.matrix).T.copy()
            for i in range(n):
                B[i, i] = B[i, i] + 1
            B[0, :] = 1
            rhs = np.zeros(n, dtype=self.xp.dtype)
            rhs[0] = 1
            if self.xp.name == "float64":
                return np.linalg.solve(B, rhs)
            return _gauss_solve(B, rhs, self.xp)

    @cached_property
    def lebesgue(self):
        with self.xp.context():
            return sum(abs(w) for w in self.weights)

    def image(self, f: Callable) -> np.ndarray:
        """Nodal values of T f with f evaluated exactly at the branch points."""
        with self.xp.context():
            g = None
            for w, y in self.branch_points():
                v = w * f(y, self.xp)
                g = v if g is None else g + v
            return np.asarray(g, dtype=self.xp.dtype)

    def apply_values(self, v: np.ndarray) -> np.ndarray:
        with self.xp.context():
            return self.matrix @ v


def _gauss_solve(B: np.ndarray, rhs: np.ndarray, xp) -> np.ndarray:
    """Gaussian elimination with partial pivoting on object arrays."""
    n = len(rhs)
    A = np.concatenate([B, rhs[:, None]], axis=1)
    for c in range(n):
        p = c + max(range(n - c), key=lambda r: abs(A[c + r, c]))
        if p != c:
            A[[c, p]] = A[[p, c]]
        piv = A[c, c]
        f = A[c + 1:, c] / piv
        A[c + 1:, c:] = A[c + 1:, c:] - f[:, None] * A[c, c:][None, :]
    x = np.empty(n, dtype=object)
    for c in range(n - 1, -1, -1):
        s = A[c, n] - (A[c, c + 1:n] @ x[c + 1:] if c + 1 < n else 0)
        x[c] = s / A[c, c]
    return x


_engines: dict = {}
_engines_lock = threading.Lock()


def _engine(spec: TransferOperatorSpec, D: int, ctx: PrecisionContext) -> _Engine:
    prec = ctx.work_bits if spec.dtype == "mp" else 53
    key = (spec.kind, D, spec.cap(ctx), spec.dtype, prec)
    with _engines_lock:
        eng = _engines.get(key)
        if eng is None:
            eng = _Engine(spec.kind, D, spec.cap(ctx), backend(spec.dtype, ctx))
            _engines[key] = eng
    return eng


def clear_cache():
    with _engines_lock:
        _engines.clear()


def _as_callable(f) -> Callable:
    if isinstance(f, ChebyshevFn):
        if f.exact is not None:
            return f.exact
        src = f

        def g(y, xp):
            return src(y)
        return g
    return f


def apply_operator(spec: TransferOperatorSpec, f, ctx: PrecisionContext = DEFAULT,
                   check: bool = True) -> ChebyshevFn:
    """One application of the operator, collocated at the spec's degree.

    Raises ResolutionError if the image is not resolved to the tolerance.
    """
    eng = _engine(spec, spec.degree, ctx)
    g = ChebyshevFn(eng.image(_as_callable(f)), None, eng.xp)
    g.__dict__["nodes"] = (eng.t, eng.lam)
    if check:
        tol = spec.tolerance(ctx)
        tail = eng.xp.to_mpf(g.tail())
        if tail > tol:
            raise ResolutionError(f"Chebyshev tail {mpmath.nstr(tail, 3)} above tol at degree {spec.degree}; increase D")
    return g


def _next_degree(D: int) -> int:
    return (3 * D // 2 + 1) // 2 * 2


def _degree_pairs(spec: TransferOperatorSpec):
    """(D, D') pairs with D' about 3D/2, walking up to max_degree."""
    D = spec.degree
    while True:
        D2 = _next_degree(D)
        if D2 > spec.max_degree:
            raise ResolutionError(f"degree {D2} would exceed max_degree {spec.max_degree}")
        yield D, D2
        if not spec.adaptive:
            return
        D = D2


def _iterate(eng: _Engine, g: np.ndarray, spec: TransferOperatorSpec, tol):
    xp = eng.xp
    spread = None
    with xp.context():
        for _ in range(spec.max_iters):
            hi, lo = max(g), min(g)
            spread = xp.to_mpf(hi - lo)
            if spread < tol:
                return xp.to_mpf((hi + lo) / 2), spread
            g = eng.apply_values(g)
    raise ConvergenceError(f"no convergence in {spec.max_iters} iterations, spread {mpmath.nstr(spread, 3)}")


def _integral_at(spec, D, f, ctx, iterate):
    eng = _engine(spec, D, ctx)
    xp = eng.xp
    g = eng.image(f)
    with xp.context():
        sup_f = xp.to_mpf(max(abs(x) for x in g))
    if iterate:
        val, spread = _iterate(eng, g, spec, spec.tolerance(ctx) / 4)
        extra = spread / 2
    else:
        with xp.context():
            val = xp.to_mpf(eng.weights @ g)
        extra = mpf(0)
    with ctx.workprec():
        extra += 16 * math.sqrt(D) * xp.to_mpf(xp.eps) * (1 + sup_f)
        if spec.kind is OperatorKind.GAUSS:
            extra += mpf(2) ** (-eng.A) * sup_f * 2
    return val, extra


def _integrate(spec, f, ctx, iterate) -> BigReal:
    f = _as_callable(f)
    tol = spec.tolerance(ctx)
    for D, D2 in _degree_pairs(spec):
        v1, e1 = _integral_at(spec, D, f, ctx, iterate)
        v2, e2 = _integral_at(spec, D2, f, ctx, iterate)
        with ctx.workprec():
            err = 2 * abs(v2 - v1) + e1 + e2
        if err < tol or not spec.adaptive:
            return BigReal(v2, err)
    raise ResolutionError("unreachable")


def integrate(spec: TransferOperatorSpec, f, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """int_0^1 f d? by iterating the operator until the iterate is flat.

    The first application evaluates f exactly at the branch points; later
    ones use the collocation matrix. The result is computed at two degrees
    D < D' and the discrepancy enters the error bound together with half the
    final spread and the branch truncation. D grows by 3/2 until the bound
    is below tol.
    """
    return _integrate(spec, f, ctx, iterate=True)


def integrate_functional(spec: TransferOperatorSpec, f, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """Same integral through the invariant weights (the iteration's limit)."""
    return _integrate(spec, f, ctx, iterate=False)


# -- moments -------------------------------------------------------------------

@dataclass(frozen=True)
class MomentTable:
    entries: tuple[BigReal, ...]
    precision_bits: int = 256

    @property
    def Lmax(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, L: int) -> BigReal:
        return self.entries[L]

    def __len__(self):
        return len(self.entries)

    def values(self) -> list[mpf]:
        return [e.value for e in self.entries]

    def to_csv(self, path_or_file, digits: int = 30):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["L", "value", "err"])
            for L, e in enumerate(self.entries):
                w.writerow([L, fmt_decimal(e.value, digits), mpmath.nstr(e.err, 3)])
        finally:
            if own:
                fh.close()


_moment_cache: dict = {}
_moment_lock = threading.Lock()


def moments(Lmax: int = 260, ctx: PrecisionContext = DEFAULT,
            spec: TransferOperatorSpec | None = None) -> MomentTable:
    """m_L = int x^L d? for L <= Lmax via the GAUSS invariant functional.

    Moments are integrated as (1 - x)^L, whose operator images stay smooth
    for large L. Each entry is computed at two degrees and the discrepancy
    is its error bound.
    """
    if Lmax < 1:
        raise ValueError("Lmax must be >= 1")
    spec = spec or TransferOperatorSpec(degree=64)
    key = (Lmax, ctx, spec)
    with _moment_lock:
        if key in _moment_cache:
            return _moment_cache[key]
    tol = spec.tolerance(ctx)
    for D, D2 in _degree_pairs(spec):
        m1 = _moments_at(spec, D, Lmax, ctx)
        m2 = _moments_at(spec, D2, Lmax, ctx)
        with ctx.workprec():
            floor = mpf(2) ** (-spec.cap(ctx)) * 2 + 16 * D2 * ctx.eps
            errs = [2 * abs(a - b) + floor for a, b in zip(m1, m2)]
        if max(errs) < tol or not spec.adaptive:
            break
    out = [BigReal.exact(1), BigReal(mpf(1) / 2, errs[1])]
    out += [BigReal(m2[L], errs[L]) for L in range(2, Lmax + 1)]
    table = MomentTable(tuple(out), ctx.bits)
    with _moment_lock:
        _moment_cache[key] = table
    return table


def _moments_at(spec, D, Lmax, ctx) -> list[mpf]:
    eng = _engine(spec, D, ctx)
    xp = eng.xp
    with xp.context():
        G = _moment_images(eng, Lmax)
        m = eng.weights @ G
    return [xp.to_mpf(x) for x in m]


def _moment_images(eng: _Engine, Lmax: int) -> np.ndarray:
    """(D+1, Lmax+1) array of T[(1-y)^L] at the nodes."""
    xp = eng.xp
    n = eng.D + 1
    if eng.kind is not OperatorKind.GAUSS:
        raise ValueError("moment tables use the GAUSS operator")
    G = np.empty((n, Lmax + 1), dtype=xp.dtype)
    for j in range(n):
        tj = eng.t[j]
        acc = [xp.scalar(0)] * (Lmax + 1) if xp.name == "mp" else np.zeros(Lmax + 1)
        for a in range(1, eng.A + 1):
            w = xp.pow2(-a)
            r = (a - 1 + tj) / (a + tj)
            p = w
            for L in range(Lmax + 1):
                acc[L] += p
                p *= r
                if p == 0:
                    break
        # tail branch at y = 0: (1 - 0)^L = 1
        tw = xp.pow2(-eng.A)
        for L in range(Lmax + 1):
            G[j, L] = acc[L] + tw
    return G


def moment_asymptotic_fit(table: MomentTable, lo: int = 40, hi: int = 130) -> dict:
    """Least-squares fit of log m_n - log(n)/4 = a sqrt(n) + c over lo..hi."""
    n = np.arange(lo, hi + 1, dtype=float)
    y = np.array([float(mpmath.log(table[int(k)].value)) for k in n]) - np.log(n) / 4
    X = np.vstack([np.sqrt(n), np.ones_like(n)]).T
    (a, c), *_ = np.linalg.lstsq(X, y, rcond=None)
    raw = y + np.log(n) / 4
    return {"a": float(a), "c": float(c), "target": -2 * math.sqrt(math.log(2)),
            "raw_ratio_range": (float(np.min(raw / np.sqrt(n))), float(np.max(raw / np.sqrt(n))))}


# -- log integrals -----------------------------------------------------------

@dataclass(frozen=True)
class LogIntegrals:
    log1p_operator: BigReal
    log1p_series: BigReal
    log_branch_series: BigReal
    log_from_identity: BigReal

    @property
    def log1p(self) -> BigReal:
        return self.log1p_operator

    @property
    def log(self) -> BigReal:
        return self.log_branch_series

    def identity_residual(self) -> BigReal:
        return self.log_branch_series + 2 * self.log1p_operator

    def question_mark_over_x(self) -> BigReal:
        """int_0^1 (?(x) - x) dx / x = -1 + 2 int log(1 + x) d?."""
        return -1 + 2 * self.log1p_operator


def log1p_series(table: MomentTable, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """log 2 - sum m_n / (n 2^n), with tail bounded by m_Lmax 2^-Lmax."""
    with ctx.workprec():
        terms = [table[n].value / (n * mpf(2) ** n) for n in range(1, table.Lmax + 1)]
        err = mpmath.fsum(table[n].err / (n * mpf(2) ** n) for n in range(1, table.Lmax + 1))
        tail = table[table.Lmax].value * mpf(2) ** (-table.Lmax) / table.Lmax * 2
        return BigReal(mpmath.log(2) - mpmath.fsum(terms), err + tail + ctx.eps * 8)


def log_series(table: MomentTable, log1p: BigReal, ctx: PrecisionContext = DEFAULT) -> BigReal:
    """int log x d? from the branch decomposition x = 1/(a + t):

        -1/2 int log(1 + t) d? - sum_{a>=2} 2^-a (log a + sum_k (-1)^(k+1) m_k / (k a^k)).
    """
    with ctx.workprec():
        L = table.Lmax
        terms, err = [], mpf(0)
        A = ctx.work_bits
        for a in range(2, A + 1):
            w = mpf(2) ** -a
            inner = mpmath.fsum((-1) ** (k + 1) * table[k].value / (k * mpf(a) ** k) for k in range(1, L + 1))
            terms.append(w * (mpmath.log(a) + inner))
            err += w * (mpmath.fsum(table[k].err / (k * mpf(a) ** k) for k in range(1, L + 1))
                        + table[L].value * mpf(a) ** -L / (L * (1 - mpf(1) / a)))
        err += mpf(2) ** -A * mpmath.log(A + 2) * 2
        return BigReal(-log1p.value / 2 - mpmath.fsum(terms), log1p.err / 2 + err + A * ctx.eps)


def log_integrals(ctx: PrecisionContext = DEFAULT, table: MomentTable | None = None,
                  spec: TransferOperatorSpec | None = None) -> LogIntegrals:
    """(int log(1+x) d?, int log x d?) by operator quadrature and the moment series."""
    spec = spec or TransferOperatorSpec(degree=64)
    table = table or moments(260, ctx)
    a = integrate_functional(spec, log1p_fn(), ctx)
    b = log1p_series(table, ctx)
    return LogIntegrals(a, b, log_series(table, a, ctx), -2 * b)


# -- Riemann-Stieltjes sums ------------------------------------------------------

def stieltjes_sum(f: Callable, m: int, rule: Rule = Rule.MIDPOINT,
                  ctx: PrecisionContext | None = None, cap: int = DEPTH_CAP) -> BigReal:
    """sum_k f(xi_k) [?(x_{k+1}) - ?(x_k)] over the generation-m Farey cells.

    Every cell has ?-mass exactly 2^-m. MIDPOINT tags are the mediants
    (the generation-m tree members), LEFT tags the left endpoints.
    With ``ctx`` the tags are evaluated in multiprecision, otherwise in
    float64 with an exactly rounded sum.
    """
    if m > cap:
        raise ResourceError(f"partition depth {m} exceeds cap {cap}")
    if rule is Rule.MIDPOINT:
        p, q = farey_arrays(m, cap)
    else:
        p, q = farey_partition(m, cap)
        p, q = p[:-1], q[:-1]
    if ctx is None:
        xp = _Float()
        v = f(p / q, xp)
        s = math.fsum(np.asarray(v, dtype=float).tolist())
        val = math.ldexp(s, -m)
        return BigReal(mpf(val), mpf(2.0 ** -50 * (1 + abs(val))))
    xp = _MP(ctx.work_bits)
    with xp.context():
        y = np.array([gmpy2.mpfr(int(a)) / int(b) for a, b in zip(p, q)], dtype=object)
        v = f(y, xp)
        s = sum(v) if len(v) else gmpy2.mpfr(0)
        val = xp.to_mpf(gmpy2.mul_2exp(s, -m))
    with ctx.workprec():
        return BigReal(val, len(v) * ctx.eps * 4)


# -- Gauss rules for d? and compound cells --------------------------------------

@dataclass(frozen=True)
class MinkowskiGaussRule:
    nodes: np.ndarray
    weights: np.ndarray


_rule_cache: dict = {}


def minkowski_gauss_rule(Q: int, D: int = 64, A: int = 60) -> MinkowskiGaussRule:
    """Q-point Gauss rule for d? in float64.

    The recurrence coefficients come from the Stieltjes procedure applied
    to the discrete measure carried by the GAUSS collocation: atoms
    1/(a + t_j) with masses 2^-a w_j. These share their moments with d?
    to float64 accuracy.
    """
    key = (Q, D, A)
    if key in _rule_cache:
        return _rule_cache[key]
    spec = TransferOperatorSpec(degree=D, branch_cap=A, dtype="float64", adaptive=False)
    eng = _engine(spec, D, DEFAULT)
    a = np.arange(1, A + 1)[:, None]
    y = (1 / (a + eng.t[None, :])).ravel()
    W = (2.0 ** -a * eng.weights[None, :]).ravel()
    y = np.append(y, 0.0)
    W = np.append(W, 2.0 ** -A)
    p_prev = np.zeros_like(y)
    p = np.ones_like(y)
    nrm = W @ (p * p)
    b0 = nrm
    alpha, beta = [], []
    for k in range(Q):
        al = W @ (y * p * p) / nrm
        alpha.append(al)
        pn = (y - al) * p - (beta[-1] if beta else 0.0) * p_prev
        nn = W @ (pn * pn)
        if k < Q - 1:
            beta.append(nn / nrm)
        p_prev, p, nrm = p, pn, nn
    J = np.diag(alpha) + np.diag(np.sqrt(beta), 1) + np.diag(np.sqrt(beta), -1)
    ev, V = np.linalg.eigh(J)
    w = V[0] ** 2 * b0
    # enforce the exact symmetry x -> 1 - x of d?
    ev = (ev + (1 - ev[::-1])) / 2
    w = (w + w[::-1]) / 2
    rule = MinkowskiGaussRule(ev, w / w.sum())
    _rule_cache[key] = rule
    return rule


def adaptive_cells(nmax: int, theta: float = 2.0, max_depth: int = 60):
    """Farey cells [a/b, c/d] refined until 2 pi nmax / min(b, d)^2 <= theta.

    The bound controls the derivative of cos(2 pi n h(t)) along the cell
    parametrization h(t) = (a(1-t) + ct) / (b(1-t) + dt). Cells at depth
    max_depth are kept regardless; their total mass is negligible.
    Returns (a, b, c, d, depth) int64 arrays.
    """
    a = np.array([0], dtype=np.int64)
    b = np.array([1], dtype=np.int64)
    c = np.array([1], dtype=np.int64)
    d = np.array([1], dtype=np.int64)
    dep = np.array([0], dtype=np.int64)
    keep = []
    while len(a):
        mn = np.minimum(b, d).astype(float)
        split = (2 * np.pi * nmax / mn ** 2 > theta) & (dep < max_depth)
        k = ~split
        keep.append((a[k], b[k], c[k], d[k], dep[k]))
        a, b, c, d, dep = a[split], b[split], c[split], d[split], dep[split]
        e, f = a + c, b + d
        a, b, c, d = (np.concatenate([a, e]), np.concatenate([b, f]),
                      np.concatenate([e, c]), np.concatenate([f, d]))
        dep = np.concatenate([dep + 1, dep + 1])
    return tuple(np.concatenate(x) for x in zip(*keep))


def compound_points(nmax: int, Q: int = 8, theta: float = 2.0, max_depth: int = 60):
    """Tags and weights of the compound Gauss rule on adaptive Farey cells.

    On a cell of depth k the measure is the image of 2^-k d? under h, so
    the Q-point rule transfers with weights 2^-k W_i.
    """
    rule = minkowski_gauss_rule(Q)
    a, b, c, d, dep = adaptive_cells(nmax, theta, max_depth)
    tau = rule.nodes
    x = ((a[:, None] * (1 - tau) + c[:, None] * tau) / (b[:, None] * (1 - tau) + d[:, None] * tau)).ravel()
    w = (np.ldexp(1.0, -dep)[:, None] * rule.weights[None, :]).ravel()
    return x, w
