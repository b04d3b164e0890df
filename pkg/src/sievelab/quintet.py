"""Products of five primes in a progression, summed with a smooth weight.

The main sum ranges over n = p*p1*p2*p3*p4 with the four smaller factors
drawn from (x^(1/6), x^(1/5)) and the congruence on n.  Splitting the
(p3, p4) plane into multiplicative boxes lets the weight argument be frozen
at the box corner, at the cost of a correction weight h derived from the
crop's slope; the box sums are then bounded by a Brun-Titchmarsh envelope.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .arith.primes import euler_phi, iter_prime_segments, primes_upto
from .crops import CropFunction
from .sieve_engine import SieveSequence, h_factor


@dataclass(frozen=True)
class HWeight:
    """Correction weight h(u) = integral of |f'| over [u, u*lam^2] cut to the
    crop support; vanishes outside [lam^-2, 2]."""

    crop: CropFunction
    lam: float
    hhat0: float  # integral of h, closed form
    _table: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def support(self) -> tuple[float, float]:
        return self.lam**-2, 2.0

    def _cumulative(self, v: np.ndarray) -> np.ndarray:
        if self._table is not None:
            grid, cum = self._table
            return np.interp(v, grid, cum)
        return np.vectorize(self.crop.cumulative_abs_slope, otypes=[np.float64])(v)

    def __call__(self, u):
        arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
        top = np.minimum(arr * self.lam**2, 2.0)
        bot = np.maximum(arr, 1.0)
        out = np.where(top > bot, self._cumulative(top) - self._cumulative(bot), 0.0)
        out = np.maximum(out, 0.0)
        if np.isscalar(u) or np.asarray(u).ndim == 0:
            return float(out[0])
        return out


def derive_h(crop: CropFunction, lam: float) -> HWeight:
    """Slope-mass correction weight for freezing two factors at a box corner."""
    if lam <= 1:
        raise ValueError("box ratio must exceed 1")
    if not crop.smooth:
        raise ValueError(f"{crop.name} crop has no slope profile")
    hhat0 = (1 - lam**-2) * crop.abs_slope_integral
    table = None
    if crop._cumulative_abs_slope is None:
        grid = np.linspace(1.0, 2.0, 20001)
        slopes = np.abs(crop.derivative(grid, 1))
        steps = np.diff(grid) * (slopes[:-1] + slopes[1:]) / 2
        table = (grid, np.concatenate([[0.0], np.cumsum(steps)]))
    return HWeight(crop=crop, lam=lam, hhat0=hhat0, _table=table)


@dataclass(frozen=True)
class Box:
    """One multiplicative cell (lo, hi] of an axis; the top cell of a grid is
    cut at the segment end and open there."""

    lo: float
    hi: float
    closed_top: bool
    index: int

    def select(self, ps: np.ndarray) -> np.ndarray:
        upper = ps <= self.hi if self.closed_top else ps < self.hi
        return ps[(ps > self.lo) & upper]

    def contains(self, p: float) -> bool:
        above = p > self.lo
        below = p <= self.hi if self.closed_top else p < self.hi
        return above and below


@dataclass(frozen=True)
class BoxGrid:
    """Geometric subdivision of (x^(1/6), x^(1/5)) used on both factor axes."""

    x: float
    lam: float
    P: float
    segments: tuple[Box, ...]

    @property
    def count(self) -> int:
        return len(self.segments) ** 2

    def pairs(self):
        for b3 in self.segments:
            for b4 in self.segments:
                yield b3, b4

    @property
    def corners(self) -> list[tuple[float, float]]:
        return [(b3.lo, b4.lo) for b3, b4 in self.pairs()]

    def locate(self, p: float) -> int:
        hits = [b.index for b in self.segments if b.contains(p)]
        if len(hits) != 1:
            raise ValueError(f"{p} lies in {len(hits)} segments; expected exactly 1")
        return hits[0]


def box_cover(x: float, lam: float) -> BoxGrid:
    """Cover (x^(1/6), x^(1/5)) by boxes (lam^m P, lam^(m+1) P], cutting the
    top box at the segment end so the union is an exact partition."""
    if lam <= 1:
        raise ValueError("box ratio must exceed 1")
    if lam > 2:
        raise ValueError("box ratio above 2 defeats the corner freeze")
    if x < 64:
        raise ValueError("need x >= 64 so the segment is nonempty")
    p_low = x ** (1 / 6)
    p_high = x**0.2
    ratio = math.log(p_low) / (5 * math.log(lam))
    n = max(1, math.ceil(ratio - 1e-12))
    segs = []
    for m in range(n):
        lo = lam**m * p_low
        if m == n - 1:
            segs.append(Box(lo=lo, hi=p_high, closed_top=False, index=m))
        else:
            segs.append(Box(lo=lo, hi=lam ** (m + 1) * p_low, closed_top=True, index=m))
    grid = BoxGrid(x=x, lam=lam, P=p_low, segments=tuple(segs))
    for c, d in grid.corners:
        ratio_x = x / (c * d)
        if not p_low**3.6 * (1 - 1e-9) < ratio_x <= p_low**4 * (1 + 1e-9):
            raise AssertionError("corner scale out of range")
    return grid


@lru_cache(maxsize=32)
def _segment_primes(x: float) -> tuple[int, ...]:
    """Primes strictly inside (x^(1/6), x^(1/5))."""
    lo = x ** (1 / 6)
    hi = x**0.2
    ps = primes_upto(math.ceil(hi))
    return tuple(int(p) for p in ps[(ps > lo) & (ps < hi)])


def quintet_sum(x: float, q: int, a: int, crop: CropFunction, segment=None) -> float:
    """Weighted, congruence-filtered count of n = p*p1*p2*p3*p4 over ordered
    distinct quadruples from the segment; the fifth prime is forced into
    (x^(1/5), 2x^(1/3)) by the window and that is asserted."""
    if math.gcd(a, q) != 1:
        raise ValueError("residue must be coprime to the modulus")
    if segment is None:
        seg_ps = _segment_primes(x)
    else:
        lo, hi = segment
        ps = primes_upto(math.ceil(hi))
        seg_ps = tuple(int(p) for p in ps[(ps > lo) & (ps < hi)])
    if len(seg_ps) < 4:
        return 0.0
    all_ps = primes_upto(int(2 * x ** (1 / 3)) + 2)
    p_floor = x**0.2
    p_ceil = 2 * x ** (1 / 3)
    parts = []
    for quad in combinations(seg_ps, 4):
        m_val = quad[0] * quad[1] * quad[2] * quad[3]
        if math.gcd(m_val, q) != 1:
            continue
        ps = all_ps[(all_ps > x / m_val) & (all_ps <= 2 * x / m_val)]
        if not ps.size:
            continue
        if ps[0] <= p_floor or ps[-1] >= p_ceil:
            raise ValueError("window admitted a fifth prime outside its forced range")
        if q > 1:
            r = a * pow(m_val, -1, q) % q
            ps = ps[ps % q == r]
        if ps.size:
            parts.append(float(np.sum(crop((ps * m_val) / x))))
    return 24 * math.fsum(parts)


def _progression_weight_sum(ps: np.ndarray, scale: float, x: float, weight, lo: float, hi: float) -> float:
    sel = ps[(ps > lo) & (ps <= hi)]
    if not sel.size:
        return 0.0
    return float(np.sum(weight(sel * scale / x)))


def boxed_sums(
    x: float,
    q: int,
    a: int,
    crop: CropFunction,
    pair: tuple[Box, Box],
    lam: float,
    hw: HWeight | None = None,
) -> tuple[float, float]:
    """(Q_f, Q_h) for one box pair: weights evaluated at the corner scale
    p*p1*p2*C*D/x while the congruence uses the true quintet."""
    if math.gcd(a, q) != 1:
        raise ValueError("residue must be coprime to the modulus")
    b3, b4 = pair
    if hw is None:
        hw = derive_h(crop, lam)
    seg = _segment_primes(x)
    ps3 = [p for p in seg if b3.contains(p)]
    ps4 = [p for p in seg if b4.contains(p)]
    if not ps3 or not ps4:
        return 0.0, 0.0
    c_corner, d_corner = b3.lo, b4.lo
    all_ps = primes_upto(int(2 * x ** (1 / 3)) + 2)
    f_lo, f_hi = crop.support
    h_lo, h_hi = hw.support
    qf_parts: list[float] = []
    qh_parts: list[float] = []
    cache: dict[tuple[int, int], tuple[float, float]] = {}
    for p1 in seg:
        for p2 in seg:
            if p2 == p1:
                continue
            duo = p1 * p2
            scale = duo * c_corner * d_corner
            for p3 in ps3:
                if p3 == p1 or p3 == p2:
                    continue
                for p4 in ps4:
                    if p4 in (p1, p2, p3):
                        continue
                    m_val = duo * p3 * p4
                    if math.gcd(m_val, q) != 1:
                        continue
                    r = a * pow(m_val, -1, q) % q if q > 1 else 0
                    key = (duo, r)
                    if key not in cache:
                        if q > 1:
                            sel = all_ps[all_ps % q == r]
                        else:
                            sel = all_ps
                        fsum = _progression_weight_sum(sel, scale, x, crop, f_lo * x / scale, f_hi * x / scale)
                        hsum = _progression_weight_sum(sel, scale, x, hw, h_lo * x / scale * (1 - 1e-12), h_hi * x / scale)
                        cache[key] = (fsum, hsum)
                    fsum, hsum = cache[key]
                    # the fifth prime must differ from the four fixed ones;
                    # the crop support already forces it above the segment,
                    # the h support does not quite
                    for s in (p1, p2, p3, p4):
                        if (q == 1 or s % q == r) and h_lo * x / scale * (1 - 1e-12) < s <= h_hi * x / scale:
                            hsum -= float(hw(s * scale / x))
                    qf_parts.append(fsum)
                    qh_parts.append(hsum)
    return math.fsum(qf_parts), math.fsum(qh_parts)


def boxed_total(x: float, q: int, a: int, crop: CropFunction, lam: float) -> dict:
    """Sum of Q_f - Q_h over the whole grid, with the pieces kept."""
    grid = box_cover(x, lam)
    hw = derive_h(crop, lam)
    qf_total: list[float] = []
    qh_total: list[float] = []
    per_box = {}
    for b3, b4 in grid.pairs():
        qf, qh = boxed_sums(x, q, a, crop, (b3, b4), lam, hw=hw)
        per_box[(b3.index, b4.index)] = (qf, qh)
        qf_total.append(qf)
        qh_total.append(qh)
    return {
        "grid": grid,
        "q_f": math.fsum(qf_total),
        "q_h": math.fsum(qh_total),
        "lower": math.fsum(qf_total) - math.fsum(qh_total),
        "per_box": per_box,
    }


def bt_bound_value(hhat0: float, x: float, q: int, lam: float, tau: float = 0.0) -> float:
    """Right side of the Brun-Titchmarsh box envelope."""
    p_low = x ** (1 / 6)
    return (
        hhat0
        * (2 + tau)
        / euler_phi(q)
        * math.log(6 / 5) ** 2
        * (math.log(lam) / math.log(p_low)) ** 2
        * 30
        * x
        / math.log(x)
    )


@dataclass(frozen=True)
class BTReport:
    bound: float  # tau = 0
    bound_with_slack: float
    measured: float
    ratio: float
    in_regime: bool


def bt_bound_qh(
    x: float,
    q: int,
    a: int,
    crop: CropFunction,
    pair: tuple[Box, Box],
    lam: float,
    tau: float = 0.0,
) -> BTReport:
    """Compare one box's measured Q_h against its envelope."""
    in_regime = q * x**0.8 <= x ** (29 / 30)
    if not in_regime:
        warnings.warn("modulus too large for the envelope's regime", stacklevel=2)
    hw = derive_h(crop, lam)
    _, qh = boxed_sums(x, q, a, crop, pair, lam, hw=hw)
    bound = bt_bound_value(hw.hhat0, x, q, lam, 0.0)
    bound_slack = bt_bound_value(hw.hhat0, x, q, lam, tau)
    ratio = qh / bound if bound > 0 else math.inf if qh > 0 else 0.0
    return BTReport(bound=bound, bound_with_slack=bound_slack, measured=qh, ratio=ratio, in_regime=in_regime)


@dataclass(frozen=True)
class LowerBoundReport:
    quintet_term: float  # Q/24
    duo_term: float
    lower_bound: float
    direct: float
    residual: float
    theta: float


def prime_progression_weight(seq: SieveSequence) -> float:
    """Direct weighted count of primes in the window's progression."""
    lo, hi = seq.window
    parts = []
    for seg in iter_prime_segments(lo, hi):
        if seq.q > 1:
            seg = seg[seg % seq.q == seq.a % seq.q]
        if seg.size:
            parts.append(float(np.sum(seq.crop(seg / seq.x))))
    return math.fsum(parts)


def progression_lower_bound(seq: SieveSequence, theta: float) -> LowerBoundReport:
    """Quintet lower bound for the weighted prime count, with the measured
    residual reported rather than asserted."""
    if not 0.8 < theta < 1:
        raise ValueError("exponent must lie in (0.8, 1)")
    big_q = quintet_sum(seq.x, seq.q, seq.a % seq.q if seq.q > 1 else 0, seq.crop)
    compensator = float(h_factor(seq, seq.x**theta))
    log_level = theta * math.log(seq.x)
    duo = 2 * compensator * seq.expected_total / log_level * math.log(1 / (2 * theta - 1))
    direct = prime_progression_weight(seq)
    lower = big_q / 24 - duo
    return LowerBoundReport(
        quintet_term=big_q / 24,
        duo_term=duo,
        lower_bound=lower,
        direct=direct,
        residual=direct - lower,
        theta=theta,
    )
