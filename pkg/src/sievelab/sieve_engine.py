"""Sifted sums over a weighted progression window.

The central object is a sequence a_n = f(n/x) on n in (x, 2x] restricted to
n = a (mod q), with divisor sums A_d, the density model g(d)X, and the
two-sided linear sieve built from decreasing prime chains.  Divisor sums
reduce to single progression sums by CRT, which the crop evaluates in O(1)
for the shapes with a fast path, so the sieve scales to x = 10^9 without
enumerating the window per divisor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith.primes import (
    factorize,
    first_in_progression,
    is_squarefree,
    primes_upto,
)
from .crops import CropFunction, sharp_crop
from .kernels import mark_strided
from .ledger.intervals import exp_gamma_interval

_CHUNK = 1 << 22


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Solve n = r1 (mod m1), n = r2 (mod m2); None when incompatible."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g != 0:
        return None
    l = m1 // g * m2
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 != g else 0
    return (r1 + m1 * t) % l, l


@dataclass(frozen=True)
class SieveSequence:
    """Weighted progression window: a_n = f(n/x) for n = a (mod q), n in (x, 2x]."""

    x: float
    q: int = 1
    a: int = 0
    crop: CropFunction = field(default_factory=sharp_crop)

    def __post_init__(self):
        if self.x < 4:
            raise ValueError("window scale too small")
        if self.q < 1:
            raise ValueError("modulus must be >= 1")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError("residue must be coprime to the modulus")

    @property
    def window(self) -> tuple[int, int]:
        return math.floor(self.x), math.floor(2 * self.x)

    @property
    def expected_total(self) -> float:
        """X, the density-model total for the whole window."""
        return self.crop.fhat0 * self.x / self.q

    def density(self, d: int) -> Fraction:
        if d < 1:
            raise ValueError("divisor must be positive")
        if math.gcd(d, self.q) != 1:
            return Fraction(0)
        return Fraction(1, d)

    def weight(self, n: int) -> float:
        if self.q > 1 and n % self.q != self.a % self.q:
            return 0.0
        return float(self.crop(n / self.x))

    def progression_sum(self, step: int, r: int) -> float:
        """Sum of crop(n/x) over n in the window with n = r (mod step)."""
        fast = self.crop.congruence_weight_sum(self.x, step, r)
        if fast is not None:
            return fast
        lo, hi = self.window
        n0 = first_in_progression(lo, step, r)
        if n0 > hi:
            return 0.0
        ns = np.arange(n0, hi + 1, step, dtype=np.int64)
        return float(np.sum(self.crop(ns / self.x)))

    def divisor_sum(self, d: int) -> float:
        """A_d: total weight on window members divisible by d."""
        sol = crt_pair(0, d, self.a % self.q, self.q)
        if sol is None:
            return 0.0
        r, m = sol
        return self.progression_sum(m, r)

    def sieve_primes(self, z: float) -> np.ndarray:
        """Primes p < z with positive density (p not dividing q)."""
        ps = primes_upto(max(1, math.ceil(z) - 1))
        ps = ps[ps < z]
        if self.q > 1:
            ps = ps[np.gcd(ps, self.q) == 1]
        return ps


@dataclass(frozen=True)
class ModelSequence:
    """Synthetic sequence whose divisor sums hit the density model exactly."""

    x: float
    q: int = 1
    total: float = 1.0

    @property
    def expected_total(self) -> float:
        return self.total

    def density(self, d: int) -> Fraction:
        if math.gcd(d, self.q) != 1:
            return Fraction(0)
        return Fraction(1, d)

    def divisor_sum(self, d: int) -> float:
        return float(self.density(d)) * self.total

    def sieve_primes(self, z: float):
        ps = primes_upto(max(1, math.ceil(z) - 1))
        ps = ps[ps < z]
        if self.q > 1:
            ps = ps[np.gcd(ps, self.q) == 1]
        return ps


@dataclass(frozen=True)
class SieveParams:
    """Level/limit pair with the scale exponents that tie them to the window."""

    y: float
    z: float
    theta: float | None = None
    ell: float | None = None

    def __post_init__(self):
        if not 2 <= self.z:
            raise ValueError("sifting limit must be >= 2")
        if self.y < self.z:
            raise ValueError("level must be >= sifting limit")

    @property
    def s(self) -> float:
        return math.log(self.y) / math.log(self.z)


def default_params(x: float, q: int = 1) -> SieveParams:
    """Level x/(q log^3 x) with z = sqrt(y)."""
    y = x / (q * math.log(x) ** 3)
    if y < 4:
        raise ValueError("window too small for the default level")
    return SieveParams(y=y, z=math.sqrt(y), theta=math.log(y) / math.log(x))


def congruence_data(seq, d: int) -> tuple[float, float, float]:
    """(A_d, g(d)X, r_d) for one divisor."""
    if d < 1:
        raise ValueError("divisor must be positive")
    if not is_squarefree(d):
        raise ValueError("divisor must be squarefree")
    a_d = seq.divisor_sum(d)
    model = float(seq.density(d)) * seq.expected_total
    return a_d, model, a_d - model


@dataclass(frozen=True)
class RemainderReport:
    total: float  # sum of |r_d| over the level-bounded divisors
    comparison: float  # X * V(z) / log y, the admissibility yardstick
    divisors: int

    @property
    def admissible(self) -> bool:
        return self.total <= self.comparison

    @property
    def margin(self) -> float:
        return self.comparison - self.total


def remainder_sum(seq, y: float, z: float) -> RemainderReport:
    """Accumulate |r_d| over squarefree d < y built from sieve primes below z."""
    if y < 1:
        raise ValueError("level must be >= 1")
    ps = [int(p) for p in seq.sieve_primes(z)]
    parts: list[float] = []

    def dfs(start: int, prod: int):
        for i in range(start, len(ps)):
            d = prod * ps[i]
            if d >= y:
                break  # ps ascending, every later branch is larger
            _, _, r_d = congruence_data(seq, d)
            parts.append(abs(r_d))
            dfs(i + 1, d)

    if y > 1:
        _, _, r1 = congruence_data(seq, 1)
        parts.append(abs(r1))
        dfs(0, 1)
        comparison = seq.expected_total * float(v_product(seq, z)) / math.log(y)
    else:
        comparison = math.inf
    return RemainderReport(math.fsum(parts), comparison, len(parts))


def sifting_function(seq: SieveSequence, z: float) -> float:
    """S(A, z): total weight on window members with no sieve-prime factor below z."""
    if z < 2:
        raise ValueError("sifting limit must be >= 2")
    return _sifted_sum(seq, 1, z)


def _sifted_sum(seq: SieveSequence, d: int, z: float) -> float:
    """S(A_d, z): weight on multiples of d sifted by the primes below z."""
    sol = crt_pair(0, d, seq.a % seq.q, seq.q)
    if sol is None:
        return 0.0
    r, m = sol
    lo, hi = seq.window
    n0 = first_in_progression(lo, m, r)
    if n0 > hi:
        return 0.0
    k_count = (hi - n0) // m + 1
    ps64 = seq.sieve_primes(z).astype(np.int64)
    if d > 1 and ps64.size:
        ps64 = ps64[d % ps64 != 0]
    if ps64.size:
        inv = np.array([pow(m % int(p), -1, int(p)) for p in ps64], dtype=np.int64)
        k_hit = (-n0 % ps64) * inv % ps64
    total = 0.0
    x = seq.x
    for c0 in range(0, k_count, _CHUNK):
        cnt = min(_CHUNK, k_count - c0)
        mask = np.zeros(cnt, dtype=np.uint8)
        if ps64.size:
            starts = (k_hit - c0) % ps64
            sel = starts < cnt
            mark_strided(mask, starts[sel], ps64[sel])
        ks = np.nonzero(mask == 0)[0]
        if ks.size:
            ns = n0 + (ks + c0) * m
            total += float(np.sum(seq.crop(ns / x)))
    return total


@dataclass(frozen=True)
class SieveWeights:
    level: float
    z: float
    kind: str  # "lower" | "upper"
    entries: dict[int, int]  # d -> lambda_d on the support


def beta_weights(y: float, z: float, kind: str, primes) -> SieveWeights:
    """Linear-sieve weights: mu(d) on decreasing prime chains whose cubed-tail
    condition p_1...p_{m-1} p_m^3 < y holds at every even (lower) or odd
    (upper) position m."""
    if kind not in ("lower", "upper"):
        raise ValueError("kind must be 'lower' or 'upper'")
    if z < 2 or y < z:
        raise ValueError("need 2 <= z <= y")
    ps = sorted((int(p) for p in primes if p < z), reverse=True)
    checked_parity = 0 if kind == "lower" else 1  # position m checked when m % 2 == this
    entries: dict[int, int] = {1: 1}

    def dfs(start: int, prod: int, depth: int):
        for i in range(start, len(ps)):
            p = ps[i]
            m = depth + 1
            if m % 2 == checked_parity and prod * p**3 >= y:
                continue
            d = prod * p
            entries[d] = 1 if m % 2 == 0 else -1
            dfs(i + 1, d, m)

    dfs(0, 1, 0)
    return SieveWeights(level=y, z=z, kind=kind, entries=entries)


def weighted_divisor_sum(seq, weights: SieveWeights) -> float:
    parts = [lam * seq.divisor_sum(d) for d, lam in weights.entries.items()]
    return math.fsum(parts)


def s_minus(seq, y: float, z: float) -> float:
    w = beta_weights(y, z, "lower", seq.sieve_primes(z))
    return weighted_divisor_sum(seq, w)


def s_plus(seq, y: float, z: float) -> float:
    w = beta_weights(y, z, "upper", seq.sieve_primes(z))
    return weighted_divisor_sum(seq, w)


def buchstab_term(seq: SieveSequence, y: float, z: float, n: int) -> float:
    """S_n: over decreasing chains p_n < ... < p_1 < z whose cubed-tail
    condition holds at every even position before n and first fails at n,
    the sifted subsequence sums S(A_{p_1...p_n}, p_n)."""
    if n % 2 != 0 or n < 2:
        raise ValueError("only even positions index a correction term")
    ps = sorted((int(p) for p in seq.sieve_primes(z)), reverse=True)
    total_parts: list[float] = []

    def dfs(start: int, prod: int, depth: int):
        for i in range(start, len(ps)):
            p = ps[i]
            m = depth + 1
            if m < n:
                if m % 2 == 0 and prod * p**3 >= y:
                    continue
                dfs(i + 1, prod * p, m)
            else:
                if prod * p**3 < y:
                    continue
                total_parts.append(_sifted_sum(seq, prod * p, p))

    dfs(0, 1, 0)
    return math.fsum(total_parts)


def buchstab_decomposition(seq: SieveSequence, y: float, z: float) -> dict:
    """All pieces of the exact identity S(A,z) = S^- + sum of even corrections."""
    direct = sifting_function(seq, z)
    lower = s_minus(seq, y, z)
    longest = len(seq.sieve_primes(z))  # chains use distinct primes
    terms = {}
    for n in range(2, longest + 1, 2):
        t = buchstab_term(seq, y, z, n)
        if t != 0.0:
            terms[n] = t
    return {
        "direct": direct,
        "lower": lower,
        "corrections": terms,
        "residual": direct - lower - math.fsum(terms.values()),
    }


def v_product(seq, z: float) -> Fraction:
    """V(z): product of (1 - g(p)) over sieve primes below z, exact."""
    num = 1
    den = 1
    for p in seq.sieve_primes(z):
        g = seq.density(int(p))
        num *= g.denominator - g.numerator
        den *= g.denominator
    return Fraction(num, den)


def h_factor(seq, y: float) -> Fraction:
    """H: product of (1 - g(p)) / (1 - 1/p) over p < y; q/phi(q) once y clears q.

    Primes with g(p) = 1/p contribute a unit factor, so only divisors of the
    modulus are touched."""
    if y < seq.q:
        raise ValueError("level below the modulus; compensator incomplete")
    out = Fraction(1)
    for p, _ in factorize(seq.q):
        if p >= y:
            continue
        g = seq.density(p)
        out *= Fraction((g.denominator - g.numerator) * p, g.denominator * (p - 1))
    return out


_EULER_E_GAMMA = float(exp_gamma_interval(128).mid)


def sieve_function_values(s: float, which: str) -> float:
    """Linear-sieve boundary curves: lower f1 on [2,4], upper F1 on [1,3]."""
    if which == "f1":
        if not 2 <= s <= 4:
            raise ValueError("f1 needs 2 <= s <= 4")
        return 2 * _EULER_E_GAMMA * math.log(s - 1) / s
    if which == "F1":
        if not 1 <= s <= 3:
            raise ValueError("F1 needs 1 <= s <= 3")
        return 2 * _EULER_E_GAMMA / s
    raise ValueError("which must be 'f1' or 'F1'")


def density_condition_check(seq, z: float, grid: int = 64) -> float:
    """Smallest nonnegative ell making the one-sided Mertens-type bound
    V(w)/V(z) <= (log z/log w)(1 + ell/log w) hold on a log grid of w."""
    if z < 4:
        raise ValueError("need z >= 4")
    ps = seq.sieve_primes(z)
    logs = np.array([math.log1p(-float(seq.density(int(p)))) for p in ps])
    cum = np.concatenate([[0.0], np.cumsum(logs)])  # cum[i] = log V at cutoff ps[i]
    log_z = math.log(z)
    v_z = cum[-1]
    best = 0.0
    ws = np.geomspace(2.0, z * 0.999, grid)
    for w in ws:
        idx = int(np.searchsorted(ps, w))
        ratio = math.exp(cum[idx] - v_z)  # V(w)/V(z)
        log_w = math.log(w)
        ell = (ratio * log_w / log_z - 1.0) * log_w
        best = max(best, ell)
    return best
