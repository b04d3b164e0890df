"""Character-twisted sums over products of three primes, and the comparison
calculus that turns real-character sign structure into density statements.

The central object is the triple sum over p, p1, p2 of
chi(p p1 p2) a_{p1} b_{p2} f(p p1 p2 / X) log p, with the two coefficient
families living on the primes of a short window [P, P^(6/5)].  Everything
here is direct summation; the analytic input (zero data, priced constants)
stays in zero_dual.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .arith import (
    character_group,
    euler_phi,
    factorize,
    iter_prime_segments,
    primes_upto,
    real_value_tables,
)
from .arith.characters import DirichletCharacter
from .crops import CropFunction

__all__ = [
    "TrioCoefficients",
    "TrioMeanReport",
    "PointwiseReport",
    "TrioCancellationReport",
    "RealZeroScan",
    "SplitDensityReport",
    "MeanSquareReport",
    "trio_sum",
    "trio_mean_report",
    "divisor_character_sum",
    "split_prime_density",
    "trio_pointwise_checks",
    "trio_cancellation_check",
    "scan_real_zero",
    "split_density_bound_check",
    "character_mean_square_check",
]

# window-ratio constants shared by every check below
_WINDOW_EXP = 1.2
_WINDOW_LOG = math.log(1.2)
_OUTER_CAP = 1e8  # largest outer prime the direct triple sum will sieve to


def _window_primes(P: float) -> np.ndarray:
    hi = int(math.floor(P**_WINDOW_EXP * (1 + 1e-12)))
    ps = primes_upto(hi)
    return ps[ps >= P]


@dataclass(frozen=True)
class TrioCoefficients:
    """Two coefficient families on the primes of [P, P^(6/5)].

    Values sit in [0, 1]; the logarithmic densities sum a_p / p and b_p / p
    are capped near log(6/5) because the window itself is, up to a
    Mertens-rate slack that density_slack reports.
    """

    P: float
    a: dict[int, float]
    b: dict[int, float]

    def __post_init__(self):
        if self.P < 3:
            raise ValueError("window base P must be at least 3")
        top = self.P**_WINDOW_EXP * (1 + 1e-12)
        for side, coeffs in (("a", self.a), ("b", self.b)):
            for p, v in coeffs.items():
                if not 0.0 <= v <= 1.0:
                    raise ValueError(f"{side}[{p}] = {v} outside [0, 1]")
                if not self.P <= p <= top:
                    raise ValueError(f"{side} support at {p} outside [P, P^(6/5)]")
                f = factorize(int(p))
                if len(f) != 1 or f[0][1] != 1:
                    raise ValueError(f"{side} support at {p}, which is not prime")

    @classmethod
    def ones(cls, P: float) -> "TrioCoefficients":
        """Both families identically 1 on every prime of the window."""
        table = {int(p): 1.0 for p in _window_primes(P)}
        return cls(P, table, dict(table))

    @property
    def density_a(self) -> float:
        return sum(v / p for p, v in self.a.items())

    @property
    def density_b(self) -> float:
        return sum(v / p for p, v in self.b.items())

    def density_slack(self) -> tuple[float, float, float]:
        """(window target log(6/5), allowance 5/log P, worst observed excess)."""
        allowance = 5.0 / math.log(self.P)
        worst = max(self.density_a, self.density_b) - _WINDOW_LOG
        return _WINDOW_LOG, allowance, worst


def _coeff_vectors(side: dict[int, float]) -> tuple[np.ndarray, np.ndarray]:
    ps = np.array(sorted(side), dtype=np.int64)
    vals = np.array([side[int(p)] for p in ps])
    return ps, vals


def trio_sum(
    X: float, chi: DirichletCharacter, coeffs: TrioCoefficients, crop: CropFunction
) -> complex:
    """The twisted triple sum: outer prime weighted by log p, the two inner
    primes by the coefficient families, the product cropped near X.

    The outer prime ranges over everything the crop support admits; expect
    X between P^(5/2) and P^4, and a warning outside that window.
    """
    P = coeffs.P
    if not P**2.5 * (1 - 1e-12) <= X <= P**4 * (1 + 1e-12):
        warnings.warn("X outside [P^(5/2), P^4]", stacklevel=2)
    pa, av = _coeff_vectors(coeffs.a)
    pb, bv = _coeff_vectors(coeffs.b)
    if pa.size == 0 or pb.size == 0:
        return 0.0 + 0.0j
    lo_u, hi_u = crop.support
    outer_hi = X * hi_u / (int(pa[0]) * int(pb[0]))
    if outer_hi > _OUTER_CAP:
        raise ValueError(f"outer prime range reaches {outer_hi:.3g}; cap is {_OUTER_CAP:.0e}")
    ops = primes_upto(int(outer_hi))
    logs = np.log(ops.astype(np.float64))
    q = chi.modulus
    if q > 1:
        table = chi.value_table()
        opm = ops % q
    total = 0.0 + 0.0j
    for p1, a1 in zip(pa, av):
        if a1 == 0.0:
            continue
        for p2, b2 in zip(pb, bv):
            if b2 == 0.0:
                continue
            m = int(p1) * int(p2)
            left = np.searchsorted(ops, X * lo_u / m, side="right")
            right = np.searchsorted(ops, X * hi_u / m, side="right")
            if left == right:
                continue
            w = crop(ops[left:right] * (m / X)) * logs[left:right]
            if q > 1:
                vals = table[(opm[left:right] * (m % q)) % q]
                total += a1 * b2 * complex(np.sum(vals * w))
            else:
                total += a1 * b2 * float(np.sum(w))
    return complex(total)


@dataclass(frozen=True)
class TrioMeanReport:
    total: float
    main: float  # fhat0 * X * density_a * density_b
    tau_residual: float  # total / (X * densities) - fhat0
    density_a: float
    density_b: float


def trio_mean_report(P: float, X: float, crop: CropFunction) -> TrioMeanReport:
    """Untwisted triple sum with unit coefficients against its mean-value
    prediction; the residual measures the prime-counting slack at scale X."""
    coeffs = TrioCoefficients.ones(P)
    total = trio_sum(X, character_group(1).principal, coeffs, crop).real
    da, db = coeffs.density_a, coeffs.density_b
    main = crop.fhat0 * X * da * db
    tau = total / (X * da * db) - crop.fhat0
    return TrioMeanReport(total, main, tau, da, db)


def divisor_character_sum(chi: DirichletCharacter, n: int) -> complex:
    """Sum of chi over the divisors of n.  On a prime p this is 1 + chi(p);
    at primes dividing the modulus it collapses to 1."""
    if n < 1:
        raise ValueError("need n >= 1")
    total = 1.0 + 0.0j
    for p, k in factorize(n):
        v = chi(p)
        geom = sum(v**j for j in range(k + 1))
        total *= geom
    return total


def split_prime_density(chi: DirichletCharacter, z: float) -> float:
    """Sum of (1 + chi(p))/p over q^2 < p <= z: twice the logarithmic
    density of the primes the character marks with +1."""
    if not chi.is_real:
        raise ValueError("density splitting needs a real character")
    q = chi.modulus
    if z < q * q:
        raise ValueError("window must reach q^2")
    rt = chi.real_table().astype(np.float64) if q > 1 else None
    total = 0.0
    for seg in iter_prime_segments(q * q, math.floor(z)):
        lam = 2.0 if rt is None else 1.0 + rt[seg % q]
        total += float(np.sum(lam / seg))
    return total


@dataclass(frozen=True)
class PointwiseReport:
    """Exhaustive sign verification for the trio and duo inequalities."""

    q: int
    characters: int
    trio_combos: int
    duo_combos: int
    exhaustive: bool  # literal residue sweep (small q) vs value-class route
    ok: bool
    counterexample: tuple | None


def _value_class_scan(rt: np.ndarray) -> tuple | None:
    present = sorted({int(v) for v in rt})
    for v in product(present, repeat=3):
        prod = 0 if 0 in v else v[0] * v[1] * v[2]
        if 1 + prod > sum(1 + x for x in v):
            return v
    for v in product(present, repeat=2):
        prod = 0 if 0 in v else v[0] * v[1]
        lam = sum(1 + x for x in v)
        if not 0 <= 1 - prod <= lam:
            return v
    return None


def _residue_sweep(rt: np.ndarray) -> tuple | None:
    q = rt.size
    r = np.arange(q)
    lam = 1 + rt.astype(np.int64)
    pair = (r[:, None] * r[None, :]) % q
    duo_bad = ~((0 <= 1 - rt[pair]) & (1 - rt[pair] <= lam[:, None] + lam[None, :]))
    if np.any(duo_bad):
        i, j = np.argwhere(duo_bad)[0]
        return int(i), int(j)
    trip = (pair[:, :, None] * r[None, None, :]) % q
    lhs = 1 + rt[trip]
    rhs = lam[:, None, None] + lam[None, :, None] + lam[None, None, :]
    bad = lhs > rhs
    if np.any(bad):
        i, j, k = np.argwhere(bad)[0]
        return int(i), int(j), int(k)
    return None


def trio_pointwise_checks(q: int) -> PointwiseReport:
    """Verify 1 + chi(p p1 p2) <= lam(p) + lam(p1) + lam(p2) and the duo
    variant 0 <= 1 - chi(p p') <= lam(p) + lam(p') for every real character
    mod q, where lam = 1 + chi on residues.

    Complete multiplicativity collapses the residue sweep to the handful of
    value-sign combinations, which is how large q is handled; small q also
    runs the literal sweep and the two must agree.
    """
    if not 1 <= q <= 10_000:
        raise ValueError("modulus must lie in [1, 10^4]")
    tables = [rt for _, rt in real_value_tables(q)]
    exhaustive = q <= 30
    counterexample = None
    for rt in tables:
        bad = _value_class_scan(rt)
        if exhaustive:
            swept = _residue_sweep(rt)
            if (bad is None) != (swept is None):
                raise AssertionError("class scan and residue sweep disagree")
            bad = swept if swept is not None else bad
        if bad is not None and counterexample is None:
            counterexample = bad
    n = len(tables)
    return PointwiseReport(
        q,
        n,
        q**3 if exhaustive else 27,
        q**2 if exhaustive else 9,
        exhaustive,
        counterexample is None,
        counterexample,
    )


@dataclass(frozen=True)
class TrioCancellationReport:
    lhs: float  # untwisted sum plus the real-twisted sum
    intermediate: float  # the lam-split majorant
    rhs: float  # (12/5) fhat0 X (1 - beta) log P
    beta: float
    in_regime: bool  # P >= q^20
    bound_holds: bool
    rounding_margin: float  # 12/5 minus the unrounded window constant


def trio_cancellation_check(
    chi: DirichletCharacter,
    X: float,
    coeffs: TrioCoefficients,
    crop: CropFunction,
    beta: float,
) -> TrioCancellationReport:
    """Nonnegativity and the split majorant for the paired trio sums.

    Two facts are asserted because they are regime-free consequences of the
    pointwise sign inequalities: the paired sum is nonnegative, and it is
    dominated by the lam-weighted majorant.  The density bound against the
    supplied beta is reported, not asserted; at desk scale P is far below
    q^20 and the report says so.
    """
    if chi.is_principal or not chi.is_real:
        raise ValueError("need a real non-principal character")
    q = chi.modulus
    P = coeffs.P
    in_regime = P >= float(q) ** 20
    if not in_regime:
        warnings.warn("P below q^20: out-of-regime numeric exercise", stacklevel=2)

    plain = trio_sum(X, character_group(1).principal, coeffs, crop)
    twisted = trio_sum(X, chi, coeffs, crop)
    assert abs(twisted.imag) < 1e-9, "real character produced an imaginary part"
    lhs = plain.real + twisted.real

    pa, av = _coeff_vectors(coeffs.a)
    pb, bv = _coeff_vectors(coeffs.b)
    lo_u, hi_u = crop.support
    outer_hi = X * hi_u / (int(pa[0]) * int(pb[0]))
    if outer_hi > _OUTER_CAP:
        raise ValueError(f"outer prime range reaches {outer_hi:.3g}; cap is {_OUTER_CAP:.0e}")
    ops = primes_upto(int(outer_hi))
    logs = np.log(ops.astype(np.float64))
    rt = chi.real_table().astype(np.float64)
    lam_outer = 1.0 + rt[ops % q]
    lam_inner = 1.0 + rt[np.concatenate([pa, pb]) % q]
    lam_a, lam_b = lam_inner[: pa.size], lam_inner[pa.size :]
    intermediate = 0.0
    for p1, a1, l1 in zip(pa, av, lam_a):
        for p2, b2, l2 in zip(pb, bv, lam_b):
            m = int(p1) * int(p2)
            left = np.searchsorted(ops, X * lo_u / m, side="right")
            right = np.searchsorted(ops, X * hi_u / m, side="right")
            if left == right:
                continue
            w = crop(ops[left:right] * (m / X)) * logs[left:right]
            intermediate += a1 * b2 * float(np.sum((lam_outer[left:right] + l1 + l2) * w))

    scale = max(1.0, intermediate)
    assert lhs >= -1e-12 * scale, "paired trio sum went negative"
    assert lhs <= intermediate + 1e-12 * scale, "lam majorant failed"

    unrounded = 2 * 2 * (1.2 + 2) * _WINDOW_LOG
    assert unrounded <= 12 / 5
    rhs = (12 / 5) * crop.fhat0 * X * (1 - beta) * math.log(P)
    return TrioCancellationReport(
        float(lhs),
        float(intermediate),
        rhs,
        beta,
        in_regime,
        bool(lhs <= rhs * (1 + 1e-12)),
        12 / 5 - unrounded,
    )


@dataclass(frozen=True)
class RealZeroScan:
    """Certified sign scan of a real character's L-function on (0, 1)."""

    zero: float | None
    resolved: bool  # False when a located crossing could not be certified
    sign_changes: int
    certified: int
    uncertified: int
    lo: float
    hi: float


def _abel_partial(chi: DirichletCharacter, M: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(1, M + 1)
    if chi.modulus > 1:
        vals = chi.real_table().astype(np.float64)[n % chi.modulus]
    else:
        vals = np.ones(M)
    return np.log(n.astype(np.float64)), vals


def _abel_value(logs: np.ndarray, vals: np.ndarray, q: int, s: float) -> tuple[float, float]:
    value = float(vals @ np.exp(-s * logs))
    M = logs.size
    bound = q * (1 + s) / (s * M**s)
    return value, bound


def scan_real_zero(
    chi: DirichletCharacter,
    grid: np.ndarray | None = None,
    M: int = 10**6,
    tol: float = 1e-8,
) -> RealZeroScan:
    """Look for a real zero of L(s, chi) on (0, 1) by certified sign changes.

    Each grid point is evaluated by truncated summation with the rigorous
    tail bound q(1+s)/(s M^s); a point only counts when the bound separates
    the value from zero, and the small-s region typically stays uncertified.
    A sign change between certified neighbours is bisected to tol.
    """
    if chi.is_principal or not chi.is_real:
        raise ValueError("the scan needs a real non-principal character")
    if M < 10**6:
        raise ValueError("the tail bound needs at least 10^6 terms")
    if grid is None:
        grid = np.arange(0.05, 1.0, 0.005)
    logs, vals = _abel_partial(chi, M)
    q = chi.modulus

    signs: list[tuple[float, int]] = []
    uncertified = 0
    for s in grid:
        v, b = _abel_value(logs, vals, q, float(s))
        if abs(v) > b:
            signs.append((float(s), 1 if v > 0 else -1))
        else:
            uncertified += 1

    zero = None
    resolved = True
    changes = 0
    for (s0, g0), (s1, g1) in zip(signs, signs[1:]):
        if g0 == g1:
            continue
        changes += 1
        if zero is not None:
            continue
        lo, hi = s0, s1
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            v, b = _abel_value(logs, vals, q, mid)
            if abs(v) <= b:
                # one escalation only; beyond 10^7 terms the arrays get heavy
                if logs.size < 10**7:
                    logs, vals = _abel_partial(chi, 10**7)
                    v, b = _abel_value(logs, vals, q, mid)
                if abs(v) <= b:
                    resolved = False
                    break
            g = 1 if v > 0 else -1
            if g == g0:
                lo = mid
            else:
                hi = mid
        zero = 0.5 * (lo + hi)
    return RealZeroScan(
        zero, resolved, changes, len(signs), uncertified, float(grid[0]), float(grid[-1])
    )


@dataclass(frozen=True)
class SplitDensityReport:
    lhs: float  # split-prime density up to x
    rhs: float  # 2 (1 - beta) log x
    beta: float | None
    verdict: str  # "holds" | "fails" | "vacuous (no real zero located)"
    scan: RealZeroScan | None


def split_density_bound_check(
    chi: DirichletCharacter,
    x: float,
    beta: float | None = None,
    scan_kwargs: dict | None = None,
) -> SplitDensityReport:
    """Compare the split-prime density against the ceiling a real zero at
    beta would impose.  Without a supplied beta the L-function is scanned;
    no located zero makes the statement vacuous and the report says so."""
    q = chi.modulus
    if x < q * q:
        raise ValueError("need x >= q^2")
    lhs = split_prime_density(chi, x)
    scan = None
    if beta is None:
        scan = scan_real_zero(chi, **(scan_kwargs or {}))
        beta = scan.zero
    if beta is None:
        return SplitDensityReport(lhs, math.nan, None, "vacuous (no real zero located)", scan)
    rhs = 2 * (1 - beta) * math.log(x)
    verdict = "holds" if lhs <= rhs * (1 + 1e-12) + 1e-12 else "fails"
    return SplitDensityReport(lhs, rhs, beta, verdict, scan)


@dataclass(frozen=True)
class MeanSquareReport:
    """Mean square of windowed prime sums over the full character group."""

    lhs: float  # character side
    progression_lhs: float  # phi(q) times the residue-class squares
    exact_match: bool | None  # cyclotomic certificate; None for non-integer c
    rhs: float  # tau = 0
    rhs_slack: float  # tau = 5 / log C
    ratio: float  # lhs / rhs
    primes: int


def _cyclotomic_certificate(
    chi_angles: list[np.ndarray], exponent: int, v: np.ndarray, target: int
) -> bool:
    """Exact route: accumulate each character sum as an integer vector over
    the exponent-th roots of unity, square via cyclic autocorrelation, and
    reduce the total modulo the cyclotomic polynomial."""
    from sympy import Poly, ZZ, cyclotomic_poly, symbols

    E = exponent
    W = np.zeros(E, dtype=object)
    for ang in chi_angles:
        u = np.zeros(E, dtype=object)
        for k, coeff in zip(ang, v):
            u[int(k)] += int(coeff)
        for d in range(E):
            W[d] += int(np.dot(u, np.roll(u, -d)))
    x = symbols("x")
    poly = Poly(list(W[::-1]), x, domain=ZZ) - Poly(target, x, domain=ZZ)
    return poly.rem(Poly(cyclotomic_poly(E, x), x, domain=ZZ)).is_zero


def character_mean_square_check(
    q: int,
    C: float,
    spread: float = 1.5,
    coeffs: dict[int, complex] | None = None,
) -> MeanSquareReport:
    """Sum |sum_p chi(p) c_p|^2 over every character mod q, for primes in
    (C, spread*C], against the progression-side identity and the
    Brun-Titchmarsh-shaped ceiling.

    With integer coefficients the character/progression agreement is also
    certified in exact arithmetic over roots of unity.
    """
    if C < q * q:
        raise ValueError("need C >= q^2")
    if spread <= 1:
        raise ValueError("spread must exceed 1")
    segs = list(iter_prime_segments(math.floor(C), math.floor(spread * C)))
    ps = np.concatenate(segs) if segs else np.empty(0, np.int64)
    if coeffs is None:
        cs = np.ones(ps.size, dtype=np.complex128)
    else:
        cs = np.array([coeffs.get(int(p), 0.0) for p in ps], dtype=np.complex128)
        if np.any(np.abs(cs) > 1 + 1e-12):
            raise ValueError("coefficients must satisfy |c_p| <= 1")
    phi = euler_phi(q)
    residues = ps % q if q > 1 else np.zeros(ps.size, dtype=np.int64)

    v = np.zeros(max(q, 1), dtype=np.complex128)
    np.add.at(v, residues, cs)
    progression_lhs = phi * float(np.sum(np.abs(v) ** 2))

    group = character_group(q)
    lhs = 0.0
    for chi in group:
        table = chi.value_table() if q > 1 else np.ones(1)
        lhs += float(np.abs(np.sum(table[residues] * cs)) ** 2)

    exact: bool | None = None
    if ps.size and np.allclose(cs.imag, 0) and np.allclose(cs.real, np.round(cs.real)):
        iv = np.round(v.real).astype(np.int64)
        target = int(phi) * int(np.sum(iv.astype(object) ** 2))
        angles = []
        for chi in group:
            ang_tab = chi.angle_table()
            angles.append(ang_tab[np.nonzero(iv)[0]] if q > 1 else np.zeros(1, np.int64))
        support = np.nonzero(iv)[0]
        exact = _cyclotomic_certificate(
            angles, group.structure.exponent if q > 1 else 1, iv[support], target
        )

    logC = math.log(C)
    base = (spread - 1) ** 2 * C**2 / (logC * math.log(C / max(q, 1)))
    rhs = 2 * base
    rhs_slack = (2 + 5 / logC) * base
    ratio = lhs / rhs if rhs else math.inf
    if ratio > 2.0:
        warnings.warn(f"mean-square ratio {ratio:.3f} above 2", stacklevel=2)
    return MeanSquareReport(lhs, progression_lhs, exact, rhs, rhs_slack, ratio, int(ps.size))
