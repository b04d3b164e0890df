"""Prime generation and elementary multiplicative arithmetic.

The segmented sieve works on a mod-30 wheel: only residues coprime to 30 are
stored (8 per block of 30), and composites are struck through the generic
strided-marking kernel, so the same index math drives both the compiled and
the numpy backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from ..kernels import mark_strided

WHEEL = np.array([1, 7, 11, 13, 17, 19, 23, 29], dtype=np.int64)
_WIDX = np.full(30, -1, dtype=np.int64)
for _i in range(8):
    _WIDX[int(WHEEL[_i])] = _i

SEGMENT_FLATS = 1 << 20  # wheel positions per segment (~3.93e6 integers)
_VALUE_CAP = 10**15  # int64 headroom for the start-index arithmetic


@dataclass(frozen=True)
class PrimeRange:
    """Half-open-from-below prime request: primes p with lo < p <= hi.

    q > 1 restricts to the progression p = a (mod q).
    """

    lo: int
    hi: int
    q: int = 1
    a: int = 0

    def __post_init__(self) -> None:
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"bad interval ({self.lo}, {self.hi}]")
        if self.hi > _VALUE_CAP:
            raise ValueError(f"hi exceeds supported bound {_VALUE_CAP}")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not 0 <= self.a < self.q:
            raise ValueError("need 0 <= a < q")


@lru_cache(maxsize=32)
def primes_upto(n: int) -> np.ndarray:
    """All primes <= n, ascending (plain bool-array sieve; used for base primes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _flat_ceil(n: int) -> int:
    """Smallest wheel-flat index whose value is >= n (n >= 0)."""
    if n <= 1:
        return 0
    b, r = divmod(n, 30)
    slot = int(np.searchsorted(WHEEL, r))
    if slot == 8:
        return 8 * (b + 1)
    return 8 * b + slot


def _flat_value(f: int) -> int:
    return 30 * (f >> 3) + int(WHEEL[f & 7])


def _segment_marks(v0: int, v1: int, f0: int, base: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start/step pairs (flat index space, offset by f0) striking every composite
    with all prime factors >= 7 in the value window [v0, v1)."""
    starts = []
    steps = 8 * base
    jmin = np.maximum(base, -(-v0 // base))  # >= p keeps p itself unmarked
    for c in WHEEL.tolist():
        j0 = jmin + ((c - jmin) % 30)
        m0 = base * j0
        flat = 8 * (m0 // 30) + _WIDX[m0 % 30] - f0
        flat[m0 >= v1] = -1
        starts.append(flat)
    return np.concatenate(starts), np.concatenate([steps] * 8)


def iter_prime_segments(
    lo: int, hi: int, segment_flats: int = SEGMENT_FLATS
) -> Iterator[np.ndarray]:
    """Yield primes in (lo, hi] as ascending int64 arrays, one per wheel segment."""
    if hi <= lo or hi < 2:
        return
    if hi > _VALUE_CAP:
        raise ValueError(f"hi exceeds supported bound {_VALUE_CAP}")
    small = [p for p in (2, 3, 5) if lo < p <= hi]
    if small:
        yield np.array(small, dtype=np.int64)
    f_lo = _flat_ceil(lo + 1)
    f_end = _flat_ceil(hi + 1)
    base_all = primes_upto(math.isqrt(hi))
    base_all = base_all[base_all >= 7]
    fs = f_lo
    while fs < f_end:
        fe = min(fs + segment_flats, f_end)
        v0 = _flat_value(fs)
        v1 = _flat_value(fe)
        cut = int(np.searchsorted(base_all, math.isqrt(v1 - 1), side="right"))
        base = base_all[:cut]
        mask = np.zeros(fe - fs, dtype=np.uint8)
        if fs == 0:
            mask[0] = 1  # the unit 1 occupies flat index 0
        if base.size:
            starts, steps = _segment_marks(v0, v1, fs, base)
            mark_strided(mask, starts, steps)
        flats = np.nonzero(mask == 0)[0]
        if flats.size:
            flats += fs
            yield 30 * (flats >> 3) + WHEEL[flats & 7]
        fs = fe


def sieve_primes(rng: PrimeRange) -> np.ndarray:
    """Primes in (rng.lo, rng.hi], optionally filtered to p = a (mod q)."""
    parts = []
    for seg in iter_prime_segments(rng.lo, rng.hi):
        if rng.q > 1:
            seg = seg[seg % rng.q == rng.a]
        if seg.size:
            parts.append(seg)
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts)


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization [(p, k), ...] by trial division, ascending p."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: list[tuple[int, int]] = []
    m = n
    for p in primes_upto(math.isqrt(n)).tolist():
        if p * p > m:
            break
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
    if m > 1:
        out.append((m, 1))
    return out


def euler_phi(n: int) -> int:
    phi = 1
    for p, k in factorize(n):
        phi *= (p - 1) * p ** (k - 1)
    return phi


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def is_squarefree(n: int) -> bool:
    return all(k == 1 for _, k in factorize(n))


def count_progression(lo: int, hi: int, step: int, r: int) -> int:
    """#{n = r (mod step) : lo < n <= hi}, exact."""
    if step < 1:
        raise ValueError("step must be >= 1")
    return (hi - r) // step - (lo - r) // step


def first_in_progression(lo: int, step: int, r: int) -> int:
    """Smallest n > lo with n = r (mod step)."""
    return lo + 1 + (r - lo - 1) % step
