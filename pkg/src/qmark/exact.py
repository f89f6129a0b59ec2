"""
Exact arithmetic for the question mark function.

Rationals are ``fractions.Fraction``; values of ?, F, Delta and Phi at
rational points are returned as :class:`DyadicRational`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

DEPTH_CAP = 30


class ResourceError(RuntimeError):
    """Raised when a request exceeds a configured size cap."""


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to a reduced Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or 'p/q'")
    return Fraction(x)


@dataclass(frozen=True, order=False)
class DyadicRational:
    """num / 2**exp, normalized so that num is odd unless it is zero."""

    num: int
    exp: int = 0

    def __post_init__(self):
        n, e = self.num, self.exp
        if n == 0:
            e = 0
        else:
            while e > 0 and not n & 1:
                n >>= 1
                e -= 1
            while e < 0:
                n <<= 1
                e += 1
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "exp", e)

    @classmethod
    def from_fraction(cls, x: Fraction) -> "DyadicRational":
        x = Fraction(x)
        d = x.denominator
        if d & (d - 1):
            raise ValueError(f"{x} is not dyadic")
        return cls(x.numerator, d.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self) -> float:
        return math.ldexp(self.num, -self.exp) if self.exp < 1000 else float(self.to_fraction())

    def _coerce(self, other):
        if isinstance(other, DyadicRational):
            return other
        if isinstance(other, (int, Fraction)):
            return DyadicRational.from_fraction(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        e = max(self.exp, o.exp)
        return DyadicRational((self.num << (e - self.exp)) + (o.num << (e - o.exp)), e)

    __radd__ = __add__

    def __neg__(self):
        return DyadicRational(-self.num, self.exp)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return DyadicRational(self.num * o.num, self.exp + o.exp)

    __rmul__ = __mul__

    def shift(self, k: int) -> "DyadicRational":
        """Multiply by 2**k."""
        return DyadicRational(self.num, self.exp - k)

    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return self.num == other.num and self.exp == other.exp
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other):
        return self.to_fraction() < Fraction(other.to_fraction() if isinstance(other, DyadicRational) else other)

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __str__(self):
        return str(self.to_fraction())

    def __repr__(self):
        return f"DyadicRational({self.num}, {self.exp})"


ZERO = DyadicRational(0)
ONE = DyadicRational(1)


@dataclass(frozen=True)
class ContinuedFraction:
    """[a0; a1, ..., ak] with a0 >= 0 and a_i >= 1."""

    a0: int
    quotients: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "quotients", tuple(int(a) for a in self.quotients))
        if self.a0 < 0 or any(a < 1 for a in self.quotients):
            raise ValueError("partial quotients must be positive")

    def value(self) -> Fraction:
        num, den = 1, 0
        for a in reversed((self.a0,) + self.quotients):
            num, den = a * num + den, num
        return Fraction(num, den)

    @property
    def is_canonical(self) -> bool:
        q = self.quotients
        return not q or q[-1] >= 2 or (len(q) == 1 and self.a0 == 0 and q[0] == 1)

    def alternate(self) -> "ContinuedFraction":
        """The other finite expansion of the same rational."""
        q = self.quotients
        if not q:
            if self.a0 == 0:
                return self
            return ContinuedFraction(self.a0 - 1, (1,))
        if q[-1] == 1 and len(q) >= 2:
            return ContinuedFraction(self.a0, q[:-2] + (q[-2] + 1,))
        if q[-1] == 1:
            return ContinuedFraction(self.a0 + 1, ())
        return ContinuedFraction(self.a0, q[:-1] + (q[-1] - 1, 1))

    def __str__(self):
        return f"[{self.a0};" + ",".join(map(str, self.quotients)) + "]"


def cf_expand(x, alternate: bool = False) -> ContinuedFraction:
    """Regular continued fraction of a rational x >= 0.

    The canonical form ends with a quotient >= 2 (``1 = [0;1]`` is the
    exception on [0, 1]); ``alternate=True`` returns the form ending in 1.
    """
    x = as_rational(x)
    if x < 0:
        raise ValueError("x must be non-negative")
    p, q = x.numerator, x.denominator
    a0, p = divmod(p, q)
    out = []
    while p:
        a, r = divmod(q, p)
        out.append(a)
        q, p = p, r
    cf = ContinuedFraction(a0, tuple(out))
    if x == 1:
        cf = ContinuedFraction(0, (1,))
    return cf.alternate() if alternate else cf


def _qm_cf(quotients) -> DyadicRational:
    num, s, sign = 0, 0, 1
    terms = []
    for a in quotients:
        s += a
        terms.append((sign, s))
        sign = -sign
    if not terms:
        return ZERO
    top = terms[-1][1]
    for sg, si in terms:
        num += sg << (top - si)
    return DyadicRational(num, top - 1)


def question_mark(x, cf: ContinuedFraction | None = None) -> DyadicRational:
    """Exact ?(x); x <= 0 gives 0 and x >= 1 gives 1."""
    if cf is None:
        x = as_rational(x)
        if x <= 0:
            return ZERO
        if x >= 1:
            return ONE
        cf = cf_expand(x)
    if cf.a0 >= 1:
        return ONE
    return _qm_cf(cf.quotients)


def question_mark_fixed(p: int, q: int, prec: int) -> int:
    """floor-ish of ?(p/q) * 2**prec as an integer, for 0 <= p <= q.

    Terms of the alternating series below 2**-prec are dropped, so the
    result is within one unit of the exact scaled value.
    """
    if p >= q:
        return 1 << prec
    acc, s, neg = 0, 0, False
    top = prec + 1
    while p:
        a, r = divmod(q, p)
        s += a
        if s > top:
            break
        if neg:
            acc -= 1 << (top - s)
        else:
            acc += 1 << (top - s)
        neg = not neg
        q, p = p, r
    return acc


def extended_F(x) -> DyadicRational:
    """F(x) = ?(x/(x+1)) on [0, inf)."""
    x = as_rational(x)
    if x < 0:
        raise ValueError("F is defined for x >= 0")
    return question_mark(x / (x + 1))


def delta(x) -> DyadicRational:
    """1 - F(x), extended to x < 0 through Delta(x+1) = Delta(x)/2."""
    x = as_rational(x)
    k = math.floor(x)
    frac = x - k
    return (ONE - extended_F(frac)).shift(-k)


def phi(x) -> DyadicRational:
    """2**floor(x) * Delta(x); periodic with period 1."""
    x = as_rational(x)
    return delta(x).shift(math.floor(x))


@dataclass(frozen=True)
class FareyGeneration:
    depth: int
    members: tuple[Fraction, ...]


def farey_arrays(m: int, cap: int = DEPTH_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators of generation m (tree order)."""
    if m < 0:
        raise ValueError("depth must be non-negative")
    if m > cap:
        raise ResourceError(f"generation {m} exceeds depth cap {cap}")
    p = np.array([1], dtype=np.int64)
    q = np.array([2], dtype=np.int64)
    for _ in range(m):
        s = p + q
        p, q = np.concatenate([p, q]), np.concatenate([s, s])
    return p, q


def farey_generation(m: int, cap: int = DEPTH_CAP) -> FareyGeneration:
    """Generation m of the tree rooted at 1/2, sorted increasingly."""
    p, q = farey_arrays(m, cap)
    members = sorted(Fraction(int(a), int(b)) for a, b in zip(p, q))
    return FareyGeneration(m, tuple(members))


def iter_farey(m: int, split: int | None = None, max_depth: int = 40) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream generation m as (p, q) chunks, one per subtree at depth ``split``.

    Chunks come out in a fixed order, so reductions over them are
    reproducible. Each chunk holds 2**(m - split) members.
    """
    if m > max_depth:
        raise ResourceError(f"generation {m} exceeds streaming cap {max_depth}")
    if split is None:
        split = max(0, m - 20)
    split = min(split, m)
    p0, q0 = farey_arrays(split, cap=max(split, DEPTH_CAP))
    for a, b in zip(p0.tolist(), q0.tolist()):
        p = np.array([a], dtype=np.int64)
        q = np.array([b], dtype=np.int64)
        for _ in range(m - split):
            s = p + q
            p, q = np.concatenate([p, q]), np.concatenate([s, s])
        yield p, q


def farey_partition(m: int, cap: int = DEPTH_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Sorted endpoints (num, den) of the generation-m cell partition of [0, 1].

    The partition consists of 0, 1 and all members of generations < m,
    giving 2**m cells of ?-mass 2**-m each.
    """
    if m > cap:
        raise ResourceError(f"partition depth {m} exceeds cap {cap}")
    p = np.array([0, 1], dtype=np.int64)
    q = np.array([1, 1], dtype=np.int64)
    for _ in range(m):
        n = len(p)
        np_ = np.empty(2 * n - 1, dtype=np.int64)
        nq = np.empty(2 * n - 1, dtype=np.int64)
        np_[0::2], nq[0::2] = p, q
        np_[1::2], nq[1::2] = p[:-1] + p[1:], q[:-1] + q[1:]
        p, q = np_, nq
    return p, q
