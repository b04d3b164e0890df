"""Directed-rounding interval arithmetic over rational endpoints.

Endpoints are exact Fractions, so plain arithmetic introduces no rounding at
all; `rounded` re-rounds outward to dyadic rationals when numerators grow too
large.  Elementary functions (pi, log, exp, sin) come from truncated series
with explicit remainder bounds folded into the returned interval, so every
result encloses the true value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

Scalar = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass int, Fraction, or str")
    return Fraction(x)


def _dyadic_floor(x: Fraction, prec: int) -> Fraction:
    return Fraction((x.numerator << prec) // x.denominator, 1 << prec)


def _dyadic_ceil(x: Fraction, prec: int) -> Fraction:
    return -_dyadic_floor(-x, prec)


@dataclass(frozen=True)
class IntervalNumber:
    """Closed interval [lo, hi] guaranteed to contain the represented real."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not (isinstance(self.lo, Rational) and isinstance(self.hi, Rational)):
            raise TypeError("endpoints must be rational")
        if self.lo > self.hi:
            raise ValueError(f"empty interval: {self.lo} > {self.hi}")

    @staticmethod
    def exact(x) -> "IntervalNumber":
        v = _as_fraction(x)
        return IntervalNumber(v, v)

    @staticmethod
    def bounds(lo, hi) -> "IntervalNumber":
        return IntervalNumber(_as_fraction(lo), _as_fraction(hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        v = Fraction(x) if not isinstance(x, float) else x
        return self.lo <= v <= self.hi

    def strictly_below(self, other: "IntervalNumber") -> bool:
        return self.hi < other.lo

    def rounded(self, prec: int) -> "IntervalNumber":
        return IntervalNumber(_dyadic_floor(self.lo, prec), _dyadic_ceil(self.hi, prec))

    def __neg__(self) -> "IntervalNumber":
        return IntervalNumber(-self.hi, -self.lo)

    def __add__(self, other) -> "IntervalNumber":
        o = _coerce(other)
        return IntervalNumber(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "IntervalNumber":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "IntervalNumber":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "IntervalNumber":
        o = _coerce(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return IntervalNumber(min(cands), max(cands))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IntervalNumber":
        o = _coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval spans zero")
        inv = IntervalNumber(1 / o.hi, 1 / o.lo)
        return self * inv

    def __rtruediv__(self, other) -> "IntervalNumber":
        return _coerce(other) / self

    def __pow__(self, n: int) -> "IntervalNumber":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        if n == 0:
            return IntervalNumber.exact(1)
        lp, hp = self.lo**n, self.hi**n
        if n % 2 == 1 or self.lo >= 0:
            return IntervalNumber(lp, hp)
        if self.hi <= 0:
            return IntervalNumber(hp, lp)
        return IntervalNumber(Fraction(0), max(lp, hp))

    def __repr__(self) -> str:
        return f"IntervalNumber({float(self.lo)!r}, {float(self.hi)!r}, width={float(self.width):.3e})"


def _coerce(x) -> IntervalNumber:
    if isinstance(x, IntervalNumber):
        return x
    return IntervalNumber.exact(x)


def _atan_inv(x: int, prec: int) -> IntervalNumber:
    """arctan(1/x) for integer x >= 2, alternating series with bracketing partial sums."""
    target = Fraction(1, 1 << (prec + 8))
    inv2 = Fraction(1, x * x)
    term = Fraction(1, x)
    s = Fraction(0)
    k = 0
    prev = None
    while True:
        contrib = term / (2 * k + 1)
        s += contrib if k % 2 == 0 else -contrib
        if contrib < target and prev is not None:
            lo, hi = (s, prev) if s <= prev else (prev, s)
            return IntervalNumber(lo, hi)
        prev = s
        term *= inv2
        k += 1


@lru_cache(maxsize=32)
def pi_interval(prec: int = 128) -> IntervalNumber:
    """Machin's formula: pi = 16 arctan(1/5) - 4 arctan(1/239)."""
    v = 16 * _atan_inv(5, prec + 8) - 4 * _atan_inv(239, prec + 8)
    return v.rounded(prec)


@lru_cache(maxsize=32)
def _log2_interval(prec: int) -> IntervalNumber:
    # log 2 = 2 atanh(1/3); positive series, tail under a geometric bound
    t = Fraction(1, 3)
    t2 = t * t
    target = Fraction(1, 1 << (prec + 8))
    term = t
    s = Fraction(0)
    j = 0
    while True:
        s += term / (2 * j + 1)
        tail = term * t2 / ((2 * j + 3) * (1 - t2))
        if tail < target:
            return IntervalNumber(2 * s, 2 * (s + tail)).rounded(prec)
        term *= t2
        j += 1


def _log_frac(v: Fraction, prec: int) -> IntervalNumber:
    if v <= 0:
        raise ValueError("log of nonpositive value")
    m = v
    k = 0
    while m >= Fraction(3, 2):
        m /= 2
        k += 1
    while m < Fraction(3, 4):
        m *= 2
        k -= 1
    t = (m - 1) / (m + 1)  # |t| <= 1/5 after reduction
    t2 = t * t
    target = Fraction(1, 1 << (prec + 8))
    term = t
    s = Fraction(0)
    j = 0
    while True:
        s += term / (2 * j + 1)
        tail = abs(term) * t2 / ((2 * j + 3) * (1 - t2))
        if tail < target:
            core = IntervalNumber(2 * (s - tail), 2 * (s + tail))
            break
        term *= t2
        j += 1
    if k:
        core = core + k * _log2_interval(prec + 8)
    return core.rounded(prec)


def log_interval(x, prec: int = 128) -> IntervalNumber:
    """Enclosure of log(x); monotone, so endpoints map to endpoints."""
    xi = _coerce(x)
    if xi.lo <= 0:
        raise ValueError("log requires a strictly positive interval")
    return IntervalNumber(_log_frac(xi.lo, prec).lo, _log_frac(xi.hi, prec).hi)


def _exp_frac(v: Fraction, prec: int) -> IntervalNumber:
    r = v
    k = 0
    while abs(r) > Fraction(1, 2):
        r /= 2
        k += 1
    target = Fraction(1, 1 << (prec + 8 + 2 * k))
    term = Fraction(1)
    s = Fraction(1)
    i = 1
    while True:
        term *= r / i
        s += term
        bound = 2 * abs(term)  # remaining terms decay faster than ratio 1/2
        if bound < target:
            break
        i += 1
    out = IntervalNumber(s - bound, s + bound)
    for _ in range(k):
        out = out * out
    return out.rounded(prec)


def exp_interval(x, prec: int = 128) -> IntervalNumber:
    """Enclosure of exp(x); monotone, so endpoints map to endpoints."""
    xi = _coerce(x)
    return IntervalNumber(_exp_frac(xi.lo, prec).lo, _exp_frac(xi.hi, prec).hi)


def sin_interval(x, prec: int = 128) -> IntervalNumber:
    """Enclosure of sin(x) for 0 <= x <= 2, via the alternating Taylor series.

    The argument restriction keeps the series terms decreasing from the first
    one, so the remainder is bounded by the first omitted term at the upper
    endpoint.
    """
    xi = _coerce(x)
    if xi.lo < 0 or xi.hi > 2:
        raise ValueError("sin_interval argument must lie in [0, 2]")
    terms = 4 + prec // 4
    acc = IntervalNumber.exact(0)
    pw = xi
    x2 = xi * xi
    fact = 1
    for kk in range(terms):
        contrib = pw * Fraction(1, fact)
        acc = acc + (contrib if kk % 2 == 0 else -contrib)
        pw = pw * x2
        fact *= (2 * kk + 2) * (2 * kk + 3)
    rem = Fraction(xi.hi**(2 * terms + 1), fact)
    return IntervalNumber(acc.lo - rem, acc.hi + rem).rounded(prec)


# Euler-Mascheroni constant, stored enclosure; endpoints cross-checked
# against an independent multiprecision evaluation in the test suite.
_GAMMA_LO = Fraction(5772156649015328, 10**16)
_GAMMA_HI = Fraction(5772156649015329, 10**16)


def euler_gamma_interval() -> IntervalNumber:
    return IntervalNumber(_GAMMA_LO, _GAMMA_HI)


def exp_gamma_interval(prec: int = 128) -> IntervalNumber:
    """Enclosure of e^gamma."""
    return exp_interval(euler_gamma_interval(), prec)
