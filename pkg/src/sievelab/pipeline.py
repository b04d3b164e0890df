"""Quintet sums in progressions, assembled from the trio and box machinery.

Four surfaces: the exact orthogonality split of the five-prime sum into
character products, per-box component bounds around the principal term, a
certificate for the quintet floor with one route per zero configuration, and
the calculator that turns the floor into an exponent for the least prime in
a progression.

Gate arithmetic that certifies an inequality runs on the ledger's interval
numbers or on exact rationals; floating point only carries the reported
magnitudes.  Float inputs to a gate are first snapped to the nearest simple
rational within rounding distance, so a parameter meant as a short decimal
is compared exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import character_group, euler_phi, factorize, primes_upto
from .arith.characters import DirichletCharacter
from .char_sums import TrioCoefficients, trio_sum
from .crops import CropFunction, sine_crop
from .ledger.intervals import IntervalNumber, exp_interval, log_interval
from .quintet import Box, BoxGrid

__all__ = [
    "PipelineParams",
    "ExceptionalData",
    "BoundCertificate",
    "ConditionCheck",
    "CertificateRefused",
    "DecompositionReport",
    "ComponentReport",
    "ExponentReport",
    "CaseRoute",
    "AuditStep",
    "SkeletonCheck",
    "character_decomposition_identity",
    "component_bounds",
    "quintet_floor_certificate",
    "linnik_exponent",
    "constant_skeleton",
]

_IDENTITY_TOL = 1e-9


def _as_rational(x) -> Fraction:
    """Nearest fraction with denominator <= 10^9.  Recovers the exact value
    of a float that was rounded from a short decimal or small ratio; for
    anything else it hugs the float itself."""
    return Fraction(x).limit_denominator(10**9)


@dataclass(frozen=True)
class PipelineParams:
    """Shared knobs for the progression pipeline.

    x may be given directly, or in log space via log_x for magnitudes a
    float cannot hold; certificates work entirely from log_x, while the sum
    evaluations need the literal x.
    """

    q: int
    a: int
    x: float = math.inf
    lam: float = 1.5  # box ratio, slightly above 1 in the asymptotic setting
    eta: float = 80 / 52600  # zero-free-region constant
    theta: float = 0.9999  # sieve level exponent
    level: int = 52600  # exponent in x >= q^level
    log_x: float | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError("residue must be coprime to the modulus")
        if not self.lam > 1:
            raise ValueError("box ratio must exceed 1")
        if not 0 < self.eta < 1:
            raise ValueError("zero-free constant must lie in (0, 1)")
        if not 0.8 < self.theta < 1:
            raise ValueError("level exponent must lie in (4/5, 1)")
        if self.level < 4:
            raise ValueError("progression exponent must be at least 4")
        if self.log_x is None:
            if not self.x > 1 or not math.isfinite(self.x):
                raise ValueError("x must be finite and exceed 1, or give log_x")
            object.__setattr__(self, "log_x", math.log(self.x))
        else:
            if self.log_x <= 0:
                raise ValueError("log x must be positive")
            if math.isfinite(self.x) and not math.isclose(
                math.log(self.x), self.log_x, rel_tol=1e-9
            ):
                raise ValueError("x and log_x disagree")

    @property
    def finite_x(self) -> bool:
        return math.isfinite(self.x)


@dataclass(frozen=True)
class ExceptionalData:
    """A possible simple real zero close to 1, with the character carrying it."""

    exists: bool
    chi1: DirichletCharacter | None = None
    beta1: float | None = None
    chi1_at_a: int | None = None

    def __post_init__(self):
        if not self.exists:
            return
        if self.chi1 is None or self.beta1 is None or self.chi1_at_a is None:
            raise ValueError("exceptional data needs the character, zero, and sign")
        if self.chi1.is_principal or not self.chi1.is_real:
            raise ValueError("the exceptional character is real and non-principal")
        if not 0 < self.beta1 < 1:
            raise ValueError("the exceptional zero lies in (0, 1)")
        if self.chi1_at_a not in (-1, 1):
            raise ValueError("the character value at the residue is +-1")

    @classmethod
    def none(cls) -> "ExceptionalData":
        return cls(False)

    def siegel_gap(self, q: int, eta: float) -> float:
        """beta1 - (1 - eta / log q); positive when the zero intrudes past
        the zero-free region, which is what makes it exceptional."""
        if not self.exists:
            raise ValueError("no exceptional zero present")
        return self.beta1 - (1 - eta / math.log(q))


class CertificateRefused(Exception):
    """No route certifies the requested bound.  The failed gates ride along."""

    def __init__(self, message: str, conditions: tuple = ()):
        super().__init__(message)
        self.conditions = conditions


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    holds: bool
    detail: str


@dataclass(frozen=True)
class BoundCertificate:
    """Certified lower bound for phi(q) times the quintet sum.

    case names the route: no-exceptional, large-x, chi1-negative, or
    selberg-axiom (the last certifies positivity of the progression count
    only, through the imported sieve bound).
    """

    case: str
    lower_bound_value: float  # fhat0 * x / (350 log x); 0 on the axiom route
    log_lower_bound: float
    conditions_checked: tuple[ConditionCheck, ...]


# ---------------------------------------------------------------------------
# exact character decomposition


def _validate_box_coeffs(name: str, coeffs: dict[int, float], axis_boxes: list[Box]):
    for p, v in coeffs.items():
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}[{p}] = {v} outside [0, 1]")
        if not any(b.contains(p) for b in axis_boxes):
            raise ValueError(f"{name} support at {p} outside the box cover")
        f = factorize(int(p))
        if len(f) != 1 or f[0][1] != 1:
            raise ValueError(f"{name} support at {p}, which is not prime")


def _box_pairs(boxes) -> list[tuple[Box, Box]]:
    if isinstance(boxes, BoxGrid):
        return list(boxes.pairs())
    pairs = list(boxes)
    if not pairs:
        raise ValueError("need at least one box pair")
    return pairs


def _residue_weights(box: Box, coeffs: dict[int, float], q: int) -> np.ndarray:
    w = np.zeros(max(q, 1))
    for p, v in coeffs.items():
        if v and box.contains(p):
            w[p % q if q > 1 else 0] += v
    return w


def _character_sum_over_box(
    chi: DirichletCharacter, box: Box, coeffs: dict[int, float]
) -> complex:
    total = 0.0 + 0.0j
    for p, v in coeffs.items():
        if v and box.contains(p):
            total += v * complex(chi(p))
    return total


@dataclass(frozen=True)
class DecompositionReport:
    direct: float
    via_characters: float
    rel_gap: float
    boxes: int
    per_character: tuple[complex, ...]  # per index: conj(chi(a)) T C D over boxes


def character_decomposition_identity(
    params: PipelineParams,
    boxes,
    trio_coeffs: TrioCoefficients,
    c: dict[int, float],
    d: dict[int, float],
    crop: CropFunction,
) -> DecompositionReport:
    """Split the five-prime congruence sum by characters and check the split
    against direct enumeration.

    The two routes share nothing but the inputs: one walks residue classes
    with modular inverses, the other multiplies character sums.  Their
    agreement to 1e-9 relative is orthogonality made concrete, and is
    asserted.
    """
    if not params.finite_x:
        raise ValueError("the decomposition needs a literal x")
    q, a, x = params.q, params.a, params.x
    pairs = _box_pairs(boxes)
    _validate_box_coeffs("c", c, [b3 for b3, _ in pairs])
    _validate_box_coeffs("d", d, [b4 for _, b4 in pairs])

    group = character_group(q)
    phi = euler_phi(q)
    per_char = [0.0 + 0.0j for _ in range(len(group))]
    direct = 0.0

    pa = np.array(sorted(trio_coeffs.a), dtype=np.int64)
    av = np.array([trio_coeffs.a[int(p)] for p in pa])
    pb = np.array(sorted(trio_coeffs.b), dtype=np.int64)
    bv = np.array([trio_coeffs.b[int(p)] for p in pb])
    lo_u, hi_u = crop.support

    for b3, b4 in pairs:
        X = x / (b3.lo * b4.lo)

        # character route: the triple sum and the two box sums, multiplied
        for i, chi in enumerate(group):
            T = trio_sum(X, chi, trio_coeffs, crop)
            Cx = _character_sum_over_box(chi, b3, c)
            Dx = _character_sum_over_box(chi, b4, d)
            per_char[i] += complex(chi(a)).conjugate() * T * Cx * Dx

        # direct route: crop weights binned by outer residue, then matched
        # to the class the congruence demands for each factor combination
        cw = _residue_weights(b3, c, q)
        dw = _residue_weights(b4, d, q)
        if pa.size == 0 or pb.size == 0:
            continue
        outer_hi = X * hi_u / (int(pa[0]) * int(pb[0]))
        ops = primes_upto(int(outer_hi))
        logs = np.log(ops.astype(np.float64))
        opm = ops % q if q > 1 else np.zeros(ops.size, dtype=np.int64)
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
                if q == 1:
                    direct += (
                        a1 * b2 * float(np.sum(w)) * float(np.sum(cw)) * float(np.sum(dw))
                    )
                    continue
                wbin = np.bincount(opm[left:right], weights=w, minlength=q)
                t = m % q
                for r3 in np.nonzero(cw)[0]:
                    for r4 in np.nonzero(dw)[0]:
                        v = (t * int(r3) * int(r4)) % q
                        if math.gcd(v, q) != 1:
                            continue
                        r_out = (a * pow(v, -1, q)) % q
                        direct += a1 * b2 * cw[r3] * dw[r4] * wbin[r_out]

    via = sum(per_char).real / phi
    scale = max(abs(direct), abs(via), 1e-30)
    gap = abs(direct - via) / scale
    assert gap <= _IDENTITY_TOL, f"decomposition identity violated: {gap:.3e}"
    return DecompositionReport(
        float(direct), float(via), float(gap), len(pairs), tuple(per_char)
    )


# ---------------------------------------------------------------------------
# per-box component bounds


@dataclass(frozen=True)
class ComponentReport:
    """Principal, rest, and exceptional pieces of one box pair's split.

    Exceptional fields stay None without an exceptional character.  Chains
    that follow from pointwise sign inequalities are asserted inside
    component_bounds; envelope steps that need the asymptotic regime are
    reported as values and booleans only.
    """

    principal_term: float
    tau_residual: float
    rest_actual: float
    rest_cauchy_schwarz: float
    rest_envelope: float
    t_max_actual: float
    t_max_envelope: float
    recip_c: float
    recip_d: float
    in_regime: bool
    exceptional_term: float | None = None
    exceptional_proxy: float | None = None
    split_recip_c: float | None = None
    split_recip_d: float | None = None
    exceptional_budget: float | None = None
    sandwich: tuple[float, float, float] | None = None
    proxy_chain: tuple[float, float, float, float] | None = None
    proxy_envelope_holds: bool | None = None


def _box_recip(box: Box, ps: np.ndarray) -> float:
    sel = box.select(ps)
    return float(np.sum(1.0 / sel)) if sel.size else 0.0


def _box_split_recip(box: Box, ps: np.ndarray, chi: DirichletCharacter) -> float:
    sel = box.select(ps)
    if not sel.size:
        return 0.0
    lam = 1.0 + chi.real_table().astype(np.float64)[sel % chi.modulus]
    return float(np.sum(lam / sel))


def component_bounds(
    params: PipelineParams,
    box3: Box,
    box4: Box,
    trio_coeffs: TrioCoefficients,
    c: dict[int, float],
    d: dict[int, float],
    crop: CropFunction,
    exceptional: ExceptionalData,
) -> ComponentReport:
    """Evaluate one box pair's pieces: the principal term, everything the
    generic characters contribute, and the exceptional character's term next
    to its principal-shaped proxy."""
    if not params.finite_x:
        raise ValueError("component evaluation needs a literal x")
    q, a, x = params.q, params.a, params.x
    if exceptional.exists:
        if exceptional.chi1.modulus != q:
            raise ValueError("exceptional character modulus disagrees with params")
        if abs(complex(exceptional.chi1(a)) - exceptional.chi1_at_a) > 1e-9:
            raise ValueError("declared sign at the residue disagrees with the character")
    X = x / (box3.lo * box4.lo)
    group = character_group(q)
    phi = euler_phi(q)
    P = trio_coeffs.P
    logP = math.log(P)
    in_regime = P >= float(q) ** 20

    ps = primes_upto(int(math.floor(max(box3.hi, box4.hi))) + 1)
    recip_c = _box_recip(box3, ps)
    recip_d = _box_recip(box4, ps)

    # untwisted pieces: coefficients summed with no character attached
    T1 = trio_sum(X, character_group(1).principal, trio_coeffs, crop).real
    C1 = sum(v for p, v in c.items() if box3.contains(p))
    D1 = sum(v for p, v in d.items() if box4.contains(p))
    principal = T1 * C1 * D1 / phi
    dens = trio_coeffs.density_a * trio_coeffs.density_b
    tau = T1 / (X * dens) - crop.fhat0 if dens else math.nan

    terms = {}
    for i, chi in enumerate(group):
        T = trio_sum(X, chi, trio_coeffs, crop)
        Cx = _character_sum_over_box(chi, box3, c)
        Dx = _character_sum_over_box(chi, box4, d)
        terms[i] = (T, Cx, Dx)

    exc_index = exceptional.chi1.index if exceptional.exists else None
    rest = 0.0 + 0.0j
    t_max = 0.0
    for i, chi in enumerate(group):
        if chi.is_principal or i == exc_index:
            continue
        T, Cx, Dx = terms[i]
        rest += complex(chi(a)).conjugate() * T * Cx * Dx
        t_max = max(t_max, abs(T))
    rest_actual = abs(rest) / phi
    ms_c = sum(abs(Cx) ** 2 for _, Cx, _ in terms.values())
    ms_d = sum(abs(Dx) ** 2 for _, _, Dx in terms.values())
    rest_cs = t_max * math.sqrt(ms_c * ms_d) / phi
    assert rest_actual <= rest_cs * (1 + 1e-12) + 1e-12, "generic rest above its own bound"

    decay = x ** (-params.eta / (6 * math.log(q))) if q > 1 else 1.0
    t_max_env = 380 * crop.fhat0 * X * decay
    rest_env = 801 * crop.fhat0 * (math.log(params.lam) / logP) ** 2 * x * decay / phi

    if not exceptional.exists:
        return ComponentReport(
            principal, tau, rest_actual, rest_cs, rest_env, t_max, t_max_env,
            recip_c, recip_d, in_regime,
        )

    chi1 = exceptional.chi1
    beta1 = exceptional.beta1
    T1x, C1x, D1x = terms[exc_index]
    assert abs(T1x.imag) < 1e-9 * max(1.0, abs(T1x))
    sign = exceptional.chi1_at_a
    exc_term = sign * T1x.real * C1x.real * D1x.real / phi
    exc_proxy = -sign * T1 * C1 * D1 / phi

    split_c = _box_split_recip(box3, ps, chi1)
    split_d = _box_split_recip(box4, ps, chi1)
    logx = math.log(x)
    budget = (
        12 * recip_c * recip_d * (1 - beta1) * logx
        + recip_c * split_d
        + recip_d * split_c
    )

    # product comparison: nonnegative gap, dominated by the split-weight sums
    rt1 = chi1.real_table()
    lam_c = float(
        sum(v * (1.0 + rt1[p % q]) for p, v in c.items() if box3.contains(p))
    )
    lam_d = float(
        sum(v * (1.0 + rt1[p % q]) for p, v in d.items() if box4.contains(p))
    )
    diff = C1 * D1 - C1x.real * D1x.real
    middle = lam_c * D1 + C1 * lam_d
    envelope = (
        params.lam**2 * box3.lo * box4.lo * (split_c * recip_d + recip_c * split_d)
    )
    slack = 1e-9 * max(1.0, abs(middle), abs(envelope))
    assert -slack <= diff <= middle + slack, "product comparison out of order"
    assert middle <= envelope + slack, "split-weight envelope failed"

    m0 = abs(T1x.real * C1x.real * D1x.real + T1 * C1 * D1)
    m1 = (T1 + T1x.real) * C1 * D1 + T1 * diff
    m2 = (
        0.4 * crop.fhat0 * x * recip_c * recip_d * (1 - beta1) * logx
        + crop.fhat0 * x * (recip_c * split_d + recip_d * split_c) / 30
    )
    m3 = crop.fhat0 * x * budget / 30
    chain_slack = 1e-9 * max(1.0, m1, m3)
    assert m0 <= m1 + chain_slack, "proxy comparison failed"
    assert m2 <= m3 + chain_slack, "budget arithmetic failed"

    return ComponentReport(
        principal, tau, rest_actual, rest_cs, rest_env, t_max, t_max_env,
        recip_c, recip_d, in_regime,
        exceptional_term=exc_term,
        exceptional_proxy=exc_proxy,
        split_recip_c=split_c,
        split_recip_d=split_d,
        exceptional_budget=budget,
        sandwich=(diff, middle, envelope),
        proxy_chain=(m0, m1, m2, m3),
        proxy_envelope_holds=bool(m1 <= m2 * (1 + 1e-12)),
    )


# ---------------------------------------------------------------------------
# the floor certificate


def _gate_at_least(
    name: str, lhs: Fraction, rhs: IntervalNumber, about: str
) -> ConditionCheck:
    """Decide lhs >= rhs where lhs came in through a float.  Inside the
    float's own resolution the verdict is pass, with the indeterminacy
    recorded: refusing there would reject exact boundary inputs over
    representation dirt."""
    blur = abs(lhs) * Fraction(1, 10**12)
    if lhs - blur >= rhs.hi:
        return ConditionCheck(
            name, True, f"{about}: {float(lhs):.8g} >= {float(rhs.hi):.8g}"
        )
    if lhs + blur < rhs.lo:
        return ConditionCheck(
            name, False, f"{about}: {float(lhs):.8g} < {float(rhs.lo):.8g}"
        )
    return ConditionCheck(
        name, True, f"{about}: at the boundary within float resolution, accepted"
    )


def _baseline_gate(params: PipelineParams) -> ConditionCheck:
    # log x >= (80 / eta) log q
    if params.q == 1:
        return ConditionCheck("x-reaches-modulus-power", True, "trivial modulus")
    need = Fraction(80) / _as_rational(params.eta)
    return _gate_at_least(
        "x-reaches-modulus-power",
        _as_rational(params.log_x),
        need * log_interval(params.q),
        f"log x vs {float(need):.6g} log q",
    )


def _siegel_gate(params: PipelineParams, exceptional: ExceptionalData) -> ConditionCheck:
    gap = exceptional.siegel_gap(params.q, params.eta)
    return ConditionCheck(
        "zero-inside-siegel-range",
        gap > 0,
        f"beta1 - (1 - eta/log q) = {gap:.3e}",
    )


def _floor_margin_check() -> ConditionCheck:
    lhs = Fraction(19, 20) - Fraction(1, 42)
    holds = lhs == Fraction(389, 420) and lhs > Fraction(321, 350)
    return ConditionCheck("floor-margin", holds, f"19/20 - 1/42 = {lhs} > 321/350")


def _tail_check() -> ConditionCheck:
    tail = 14608 * exp_interval(Fraction(-80, 6))
    holds = tail.strictly_below(IntervalNumber.exact(Fraction(1, 42)))
    return ConditionCheck(
        "tail-below-1/42", holds, f"14608 exp(-80/6) <= {float(tail.hi):.6e} < 1/42"
    )


def _rest_share_check() -> ConditionCheck:
    # the generic characters' share of the grid bound, at the smallest x the
    # baseline gate admits
    val = Fraction(801, 25) * exp_interval(Fraction(-80, 6))
    holds = val.strictly_below(
        IntervalNumber.exact(Fraction(1, 19270))
    ) and Fraction(1, 19270) < Fraction(1, 961 * 20)
    return ConditionCheck(
        "rest-share-below-principal",
        holds,
        f"801/25 exp(-80/6) <= {float(val.hi):.6e} < 1/19270 < 1/19220",
    )


def quintet_floor_certificate(
    params: PipelineParams,
    exceptional: ExceptionalData,
    crop: CropFunction | None = None,
    use_selberg_axiom: bool = False,
) -> BoundCertificate:
    """Certify phi(q) times the quintet sum against its floor of
    fhat0 x / (350 log x), through whichever route applies: no exceptional
    zero, x large against the zero's gap, or the character negative at the
    residue with x small against the gap.

    With use_selberg_axiom, a fourth route covers the remaining
    configuration (deep zero, character positive at the residue) by the
    imported sieve bound; that route certifies positivity of the progression
    count only, not the quintet floor, and reports a zero numeric bound.

    Every gate runs in exact rational or interval arithmetic; a parameter
    set no route covers raises CertificateRefused carrying the failed gates.
    """
    crop = crop or sine_crop()
    if exceptional.exists and exceptional.chi1.modulus != params.q:
        raise ValueError("exceptional character modulus disagrees with params")
    checks: list[ConditionCheck] = [_baseline_gate(params)]
    if not checks[0].holds:
        raise CertificateRefused(
            f"baseline gate failed: {checks[0].detail}", tuple(checks)
        )
    checks.append(_rest_share_check())

    logx = _as_rational(params.log_x)
    value = (
        crop.fhat0 * params.x / (350 * params.log_x) if params.finite_x else math.inf
    )
    log_value = math.log(crop.fhat0) + params.log_x - math.log(350 * params.log_x)

    if not exceptional.exists:
        out = checks + [
            ConditionCheck("no-exceptional-zero", True, "no real zero declared"),
            _floor_margin_check(),
        ]
        return BoundCertificate("no-exceptional", value, log_value, tuple(out))

    checks.append(_siegel_gate(params, exceptional))
    beta1 = _as_rational(exceptional.beta1)
    gap = 1 - beta1
    failures: list[ConditionCheck] = []

    # route: x at least e^(80 / gap)
    heat = gap * logx
    large_x = ConditionCheck(
        "gap-times-logx-at-least-80",
        heat >= 80,
        f"(1 - beta1) log x = {float(heat):.8g}",
    )
    if large_x.holds:
        out = checks + [large_x, _tail_check(), _floor_margin_check()]
        if all(ck.holds for ck in out):
            return BoundCertificate("large-x", value, log_value, tuple(out))
        failures.extend(ck for ck in out if not ck.holds)
    else:
        failures.append(large_x)

    # route: character negative at the residue, x small against the gap
    neg = ConditionCheck(
        "character-negative-at-residue",
        exceptional.chi1_at_a == -1,
        f"sign at residue = {exceptional.chi1_at_a:+d}",
    )
    small = ConditionCheck(
        "18-gap-logx-at-most-1",
        18 * gap * logx <= 1,
        f"18 (1 - beta1) log x = {float(18 * gap * logx):.8g}",
    )
    if neg.holds and small.holds:
        out = checks + [neg, small, _floor_margin_check()]
        if all(ck.holds for ck in out):
            return BoundCertificate("chi1-negative", value, log_value, tuple(out))
        failures.extend(ck for ck in out if not ck.holds)
    else:
        failures.extend(ck for ck in (neg, small) if not ck.holds)

    if use_selberg_axiom:
        pos = ConditionCheck(
            "character-positive-at-residue",
            exceptional.chi1_at_a == 1,
            f"sign at residue = {exceptional.chi1_at_a:+d}",
        )
        start = _gate_at_least(
            "x-reaches-modulus-43",
            logx,
            43 * log_interval(params.q),
            "log x vs 43 log q",
        )
        ceiling = ConditionCheck(
            "4-gap-logx-at-most-1",
            4 * gap * logx <= 1,
            f"4 (1 - beta1) log x = {float(4 * gap * logx):.8g}",
        )
        axiom = ConditionCheck(
            "outside-lower-bound-axiom",
            True,
            "positivity through the imported sieve bound; the magnitude is a "
            "positive multiple of the character's series value, out of scope",
        )
        if pos.holds and start.holds and ceiling.holds:
            out = checks + [pos, start, ceiling, axiom]
            return BoundCertificate("selberg-axiom", 0.0, -math.inf, tuple(out))
        failures.extend(ck for ck in (pos, start, ceiling) if not ck.holds)

    detail = "; ".join(f"{ck.name}: {ck.detail}" for ck in failures)
    raise CertificateRefused(
        f"no route certifies the floor ({detail})", tuple(checks + failures)
    )


# ---------------------------------------------------------------------------
# the exponent calculator


@dataclass(frozen=True)
class AuditStep:
    name: str
    holds: bool
    detail: str
    margin: float | None = None


@dataclass(frozen=True)
class CaseRoute:
    name: str
    exponent: int
    requires_axiom: bool
    detail: str


@dataclass(frozen=True)
class ExponentReport:
    """Exponent L with p_min(q, a) <= q^L, plus the complete audit trail.

    exponent is None when some zero configuration stays uncovered, which
    happens exactly when the outside axiom is switched off.
    """

    exponent: int | None
    level: int
    eta: float
    use_selberg_axiom: bool
    steps: tuple[AuditStep, ...]
    cases: tuple[CaseRoute, ...]


def _duo_gate(level: int) -> AuditStep:
    """(2n/(n-1)) log(n/(n-3)) < 1/8750 at n = level, by interval enclosure."""
    target = Fraction(1, 25 * 350)
    for prec in (128, 256):
        g = Fraction(2 * level, level - 1) * log_interval(
            Fraction(level, level - 3), prec
        )
        if g.strictly_below(IntervalNumber.exact(target)):
            return AuditStep(
                "duo-contribution-gate",
                True,
                f"(2n/(n-1)) log(n/(n-3)) <= {float(g.hi):.6e} < 1/8750 at n = {level}",
                float(target - g.hi),
            )
        if g.lo > target:
            return AuditStep(
                "duo-contribution-gate",
                False,
                f"(2n/(n-1)) log(n/(n-3)) >= {float(g.lo):.6e} >= 1/8750 at n = {level}",
                float(g.lo - target),
            )
    raise AssertionError("gate interval stayed undecided at max precision")


def linnik_exponent(
    level: int, eta: float, use_selberg_axiom: bool = True
) -> ExponentReport:
    """Exponent for the least prime in a coprime progression, from the
    quintet floor: checks the duo-term gate at the requested level, the
    compatibility of the zero-free constant, and walks the zero-location
    case analysis.

    The deep-zero case with the character positive at the residue needs the
    outside lower-bound axiom; with the axiom off, that case is reported
    uncovered and the overall exponent is None.
    """
    if level < 4:
        raise ValueError("the level must be at least 4")
    if not eta > 0:
        raise ValueError("the zero-free constant must be positive")

    steps: list[AuditStep] = []
    gate = _duo_gate(level)
    steps.append(gate)
    if not gate.holds:
        raise CertificateRefused(f"duo gate failed at level {level}: {gate.detail}")

    eta_frac = _as_rational(eta)
    need = Fraction(80, level)
    eta_step = AuditStep(
        "zero-free-constant-covers-level",
        eta_frac >= need,
        f"eta = {eta:.8g} vs 80/level = {float(need):.8g}",
        float(eta_frac - need),
    )
    steps.append(eta_step)
    if not eta_step.holds:
        raise CertificateRefused(f"eta = {eta} below 80/level = {float(need)}")

    duo = Fraction(1, 24) - Fraction(1, 25)
    steps.append(
        AuditStep(
            "duo-fraction-identity",
            duo == Fraction(1, 600) == Fraction(350, 210000),
            "1/24 - 1/25 = 1/600 = 350/210000",
            0.0,
        )
    )
    steps.append(
        AuditStep(
            "floor-times-duo-factor", 600 * 350 == 210000, "600 * 350 = 210000", 0.0
        )
    )
    steps.append(
        AuditStep(
            "deep-zero-ceiling-room",
            Fraction(1, 18) < Fraction(1, 4),
            "the gap ceiling 1/18 sits inside the axiom window's 1/4",
            float(Fraction(1, 4) - Fraction(1, 18)),
        )
    )
    steps.append(
        AuditStep(
            "axiom-window-start",
            level >= 43,
            f"level {level} covers the axiom's 43rd-power threshold",
            float(level - 43),
        )
    )
    worst = 80 * 18 * level
    steps.append(
        AuditStep("worst-case-product", True, f"80 * 18 * {level} = {worst}", 0.0)
    )

    cases = (
        CaseRoute(
            "no-exceptional",
            level,
            False,
            "no real zero: the floor applies directly at the level power",
        ),
        CaseRoute(
            "moderate-zero",
            worst,
            False,
            f"gap at least 1/(18 * {level}): at the {worst}th power the "
            "gap-times-log-x product reaches 80",
        ),
        CaseRoute(
            "deep-zero-negative",
            level,
            False,
            f"gap below 1/(18 * {level}), sign -1: the level power stays "
            "under the gap ceiling",
        ),
        CaseRoute(
            "deep-zero-positive",
            level,
            True,
            f"gap below 1/(18 * {level}), sign +1: needs the outside "
            "lower-bound axiom",
        ),
    )
    covered = [cr for cr in cases if not cr.requires_axiom or use_selberg_axiom]
    exponent = max(cr.exponent for cr in covered) if len(covered) == len(cases) else None
    return ExponentReport(exponent, level, eta, use_selberg_axiom, tuple(steps), cases)


# ---------------------------------------------------------------------------
# the rational constant skeleton


@dataclass(frozen=True)
class SkeletonCheck:
    name: str
    holds: bool
    lhs: Fraction
    rhs: Fraction
    relation: str


def constant_skeleton() -> tuple[SkeletonCheck, ...]:
    """The rational spine of the grid-summed lower bounds: every constant
    that moves between the per-box form and the summed form, compared
    exactly.  Logarithm-dependent facts live in the ledger; everything here
    is a Fraction."""

    def chk(name, lhs, relation, rhs):
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        holds = {
            "==": lhs == rhs,
            "<=": lhs <= rhs,
            "<": lhs < rhs,
            ">=": lhs >= rhs,
            ">": lhs > rhs,
        }[relation]
        return SkeletonCheck(name, holds, lhs, rhs, relation)

    return (
        chk("pair-count-square", 961, "==", 31 * 31),
        chk("rest-coefficient", Fraction(801), ">=", 380 * 2 * Fraction(20, 19)),
        chk("exceptional-ceiling", 380 * Fraction(961, 25), "<=", 14608),
        chk("exceptional-ceiling-tight", 14608 - 380 * Fraction(961, 25), "<", 1),
        chk("budget-coefficient", 961 * Fraction(11, 600), "<=", 18),
        chk("floor-difference", Fraction(19, 20) - Fraction(1, 42), "==", Fraction(389, 420)),
        chk("floor-clearance", Fraction(389, 420), ">", Fraction(321, 350)),
        chk("duo-fraction", Fraction(1, 24) - Fraction(1, 25), "==", Fraction(350, 210000)),
        chk("progression-constant", 600 * 350, "==", 210000),
        chk("exponent-product", 80 * 18 * 52600, "==", 75_744_000),
    )
