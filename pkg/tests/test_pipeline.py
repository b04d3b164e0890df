"""Exercises for the assembled progression pipeline.

The character split is checked against a literal five-fold loop built on
sympy primes and an inline crop formula, the component report against
hand-evaluated box sums, and the certificate and exponent calculators
against their gate values recomputed here in plain arithmetic.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from sievelab.arith import character_group, primes_upto
from sievelab.char_sums import TrioCoefficients
from sievelab.crops import sine_crop
from sievelab.pipeline import (
    AuditStep,
    BoundCertificate,
    CertificateRefused,
    ExceptionalData,
    PipelineParams,
    character_decomposition_identity,
    component_bounds,
    constant_skeleton,
    linnik_exponent,
    quintet_floor_certificate,
)
from sievelab.quintet import Box, box_cover


@pytest.fixture(scope="module")
def sine():
    return sine_crop()


def _sine_value(u: float) -> float:
    if not 1.0 <= u <= 2.0:
        return 0.0
    return math.sin(math.pi * (u - 1.0)) ** 2 / (8 * math.pi**4)


# the small-scale configuration the brute-force oracle can afford:
# x = 4e6, one box pair off the diagonal, fixed fractional coefficients
_X_SMALL = 4.0e6
_P_SMALL = _X_SMALL ** (1 / 6)
_C_SMALL = {13: 0.663, 17: 0.907}
_D_SMALL = {19: 0.798, 23: 0.303}
_A_SMALL = {13: 0.37, 17: 0.886, 19: 0.105}
_B_SMALL = {13: 0.839, 17: 0.817, 19: 0.521}


def _small_boxes() -> tuple[Box, Box]:
    lo = _P_SMALL
    return Box(lo, 1.5 * lo, True, 0), Box(1.5 * lo, 2.25 * lo, True, 1)


def _quintuple_oracle(q: int, a: int) -> float:
    """Sum over all five-prime products in one congruence class, walked
    literally with sympy primes and the inline crop formula."""
    b3, b4 = _small_boxes()
    X = _X_SMALL / (b3.lo * b4.lo)
    lo_m = min(_A_SMALL) * min(_B_SMALL)
    outer = list(sympy.primerange(2, int(2 * X / lo_m) + 2))
    total = 0.0
    for p1, a1 in _A_SMALL.items():
        for p2, b2 in _B_SMALL.items():
            m = p1 * p2
            for p in outer:
                if not X < p * m <= 2 * X:
                    continue
                w = a1 * b2 * _sine_value(p * m / X) * math.log(p)
                for p3, cv in _C_SMALL.items():
                    for p4, dv in _D_SMALL.items():
                        if (p * p1 * p2 * p3 * p4 - a) % q == 0:
                            total += w * cv * dv
    return total


_ORACLE_FROZEN = {
    (1, 1): 0.20696887359048502,
    (3, 2): 0.1035557460685137,
    (5, 2): 0.04989041918590291,
    (7, 4): 0.03695142226208192,
}


class TestParams:
    def test_log_x_filled_from_x(self):
        p = PipelineParams(q=5, a=2, x=1e8)
        assert p.log_x == pytest.approx(math.log(1e8), rel=1e-15)
        assert p.finite_x

    def test_log_space_only(self):
        p = PipelineParams(q=5, a=2, log_x=8e7)
        assert not p.finite_x

    def test_rejects_mismatched_pair(self):
        with pytest.raises(ValueError, match="disagree"):
            PipelineParams(q=5, a=2, x=1e8, log_x=5.0)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(q=0, a=1),
            dict(q=6, a=3),
            dict(q=5, a=2, lam=1.0),
            dict(q=5, a=2, eta=0.0),
            dict(q=5, a=2, theta=0.5),
            dict(q=5, a=2, level=3),
            dict(q=5, a=2, x=0.5),
            dict(q=5, a=2, log_x=-1.0),
        ],
    )
    def test_validation(self, kw):
        kw.setdefault("x", 1e6)
        with pytest.raises(ValueError):
            PipelineParams(**kw)

    def test_infinite_x_needs_log(self):
        with pytest.raises(ValueError):
            PipelineParams(q=5, a=2)


class TestExceptionalData:
    def test_none(self):
        e = ExceptionalData.none()
        assert not e.exists
        with pytest.raises(ValueError):
            e.siegel_gap(5, 0.01)

    def test_requires_real_nonprincipal(self):
        g = character_group(5)
        with pytest.raises(ValueError):
            ExceptionalData(True, g.principal, 0.9, 1)
        with pytest.raises(ValueError):
            ExceptionalData(True, g.character(1), 0.9, 1)

    def test_field_checks(self):
        chi = character_group(5).character(2)
        with pytest.raises(ValueError):
            ExceptionalData(True, chi, 1.5, 1)
        with pytest.raises(ValueError):
            ExceptionalData(True, chi, 0.9, 0)
        with pytest.raises(ValueError):
            ExceptionalData(True, None, 0.9, 1)

    def test_siegel_gap(self):
        chi = character_group(5).character(2)
        e = ExceptionalData(True, chi, 0.999, -1)
        expect = 0.999 - (1 - 0.01 / math.log(5))
        assert e.siegel_gap(5, 0.01) == pytest.approx(expect, rel=1e-12)


class TestDecomposition:
    def test_all_zero_coefficients(self, sine):
        b3, b4 = _small_boxes()
        params = PipelineParams(q=5, a=2, x=_X_SMALL)
        rep = character_decomposition_identity(
            params, [(b3, b4)], TrioCoefficients(_P_SMALL, {}, {}), {}, {}, sine
        )
        assert rep.direct == 0.0 and rep.via_characters == 0.0

    @pytest.mark.parametrize("q,a", sorted(_ORACLE_FROZEN))
    def test_against_quintuple_loop(self, sine, q, a):
        b3, b4 = _small_boxes()
        coeffs = TrioCoefficients(_P_SMALL, _A_SMALL, _B_SMALL)
        params = PipelineParams(q=q, a=a, x=_X_SMALL)
        rep = character_decomposition_identity(
            params, [(b3, b4)], coeffs, _C_SMALL, _D_SMALL, sine
        )
        oracle = _quintuple_oracle(q, a)
        assert rep.direct == pytest.approx(oracle, rel=1e-11)
        assert rep.via_characters == pytest.approx(oracle, rel=1e-9)
        assert rep.direct == pytest.approx(_ORACLE_FROZEN[(q, a)], rel=1e-12)
        assert rep.rel_gap <= 1e-9

    def test_single_box_all_ones(self, sine):
        x, lam = 1e8, 1.5
        P = x ** (1 / 6)
        b = Box(P, lam * P, True, 0)
        c = {int(p): 1.0 for p in primes_upto(int(lam * P) + 1) if b.contains(int(p))}
        assert sorted(c) == [23, 29, 31]
        params = PipelineParams(q=5, a=2, x=x, lam=lam)
        rep = character_decomposition_identity(
            params, [(b, b)], TrioCoefficients.ones(P), c, dict(c), sine
        )
        assert rep.direct == pytest.approx(5.624435061062092, rel=1e-12)
        assert rep.rel_gap < 1e-12
        # untwisted term dominates; the twisted pair is conjugate-symmetric
        assert rep.per_character[0].real == pytest.approx(22.516583262194054, rel=1e-12)
        assert rep.per_character[1] == pytest.approx(
            rep.per_character[3].conjugate(), rel=1e-12
        )

    def test_real_character_term_recomputed(self, sine):
        from sievelab.char_sums import trio_sum

        x, lam = 1e8, 1.5
        P = x ** (1 / 6)
        b = Box(P, lam * P, True, 0)
        c = {int(p): 1.0 for p in primes_upto(int(lam * P) + 1) if b.contains(int(p))}
        coeffs = TrioCoefficients.ones(P)
        params = PipelineParams(q=4, a=3, x=x, lam=lam)
        rep = character_decomposition_identity(params, [(b, b)], coeffs, c, dict(c), sine)
        chi = character_group(4).character(1)
        assert chi.is_real and not chi.is_principal
        X = x / (b.lo * b.lo)
        box_sum = sum(v * complex(chi(p)) for p, v in c.items())
        manual = complex(chi(3)).conjugate() * trio_sum(X, chi, coeffs, sine) * box_sum**2
        assert rep.per_character[1] == pytest.approx(manual, rel=1e-12)

    def test_grid_input(self, sine):
        x, lam = 1e8, 1.5
        grid = box_cover(x, lam)
        pairs = list(grid.pairs())
        top = max(max(p[0].hi, p[1].hi) for p in pairs)
        ps = primes_upto(int(top) + 1)
        c = {int(p): 1.0 for p in ps if any(b3.contains(int(p)) for b3, _ in pairs)}
        params = PipelineParams(q=3, a=1, x=x, lam=lam)
        rep = character_decomposition_identity(
            params, grid, TrioCoefficients.ones(x ** (1 / 6)), c, dict(c), sine
        )
        assert rep.boxes == len(pairs)
        assert rep.rel_gap <= 1e-9

    def test_support_outside_boxes(self, sine):
        b3, b4 = _small_boxes()
        params = PipelineParams(q=5, a=2, x=_X_SMALL)
        coeffs = TrioCoefficients(_P_SMALL, _A_SMALL, _B_SMALL)
        with pytest.raises(ValueError, match="outside the box cover"):
            character_decomposition_identity(
                params, [(b3, b4)], coeffs, {5: 1.0}, _D_SMALL, sine
            )
        with pytest.raises(ValueError, match="outside"):
            character_decomposition_identity(
                params, [(b3, b4)], coeffs, {13: 1.5}, _D_SMALL, sine
            )
        with pytest.raises(ValueError, match="not prime"):
            character_decomposition_identity(
                params, [(b3, b4)], coeffs, {15: 1.0}, _D_SMALL, sine
            )

    def test_needs_literal_x(self, sine):
        b3, b4 = _small_boxes()
        params = PipelineParams(q=5, a=2, log_x=100.0)
        with pytest.raises(ValueError, match="literal x"):
            character_decomposition_identity(
                params, [(b3, b4)], TrioCoefficients(_P_SMALL, {}, {}), {}, {}, sine
            )

    def test_empty_pair_list(self, sine):
        params = PipelineParams(q=5, a=2, x=_X_SMALL)
        with pytest.raises(ValueError, match="box pair"):
            character_decomposition_identity(
                params, [], TrioCoefficients(_P_SMALL, {}, {}), {}, {}, sine
            )


def _ones_setup(x: float, lam: float):
    P = x ** (1 / 6)
    b = Box(P, lam * P, True, 0)
    c = {int(p): 1.0 for p in primes_upto(int(lam * P) + 1) if b.contains(int(p))}
    return b, c, TrioCoefficients.ones(P)


class TestComponentBounds:
    def test_without_exceptional(self, sine):
        b, c, coeffs = _ones_setup(1e8, 1.5)
        params = PipelineParams(q=5, a=2, x=1e8, lam=1.5)
        rep = component_bounds(
            params, b, b, coeffs, c, dict(c), sine, ExceptionalData.none()
        )
        assert rep.principal_term == pytest.approx(5.6291458155485135, rel=1e-12)
        assert rep.tau_residual == pytest.approx(-2.513315798837476e-05, rel=1e-9)
        assert rep.rest_actual == pytest.approx(0.004710754486419405, rel=1e-12)
        assert rep.rest_cauchy_schwarz == pytest.approx(0.18998631615463912, rel=1e-12)
        assert rep.rest_actual <= rep.rest_cauchy_schwarz
        assert rep.t_max_actual == pytest.approx(0.06332877205154637, rel=1e-12)
        assert not rep.in_regime
        assert rep.exceptional_term is None
        assert rep.sandwich is None
        assert rep.proxy_chain is None

    def test_all_ones_bracket(self, sine):
        b, c, coeffs = _ones_setup(1e8, 1.5)
        params = PipelineParams(q=5, a=2, x=1e8, lam=1.5)
        rep = component_bounds(
            params, b, b, coeffs, c, dict(c), sine, ExceptionalData.none()
        )
        box_sum = sum(c.values())
        assert b.lo * rep.recip_c <= box_sum <= 1.5 * b.lo * rep.recip_c
        assert rep.recip_c == pytest.approx(sum(1 / p for p in c), rel=1e-12)

    def test_with_exceptional(self, sine):
        b, c, coeffs = _ones_setup(1e8, 1.5)
        chi1 = character_group(5).character(2)
        exc = ExceptionalData(True, chi1, 0.9, -1)
        params = PipelineParams(q=5, a=2, x=1e8, lam=1.5)
        rep = component_bounds(params, b, b, coeffs, c, dict(c), sine, exc)
        # the exceptional index leaves the generic rest, which loses its
        # cancellation partner and grows
        assert rep.rest_actual == pytest.approx(0.01346332461952911, rel=1e-12)
        assert rep.exceptional_term == pytest.approx(0.008752570133109705, rel=1e-12)
        assert rep.exceptional_proxy == pytest.approx(rep.principal_term, rel=1e-12)
        assert rep.split_recip_c == pytest.approx(0.13348164627363737, rel=1e-12)
        assert rep.exceptional_budget == pytest.approx(0.29795921355865224, rel=1e-12)
        diff, middle, envelope = rep.sandwich
        assert diff == pytest.approx(8.0, abs=1e-12)
        assert middle == pytest.approx(24.0, abs=1e-12)
        assert envelope == pytest.approx(30.729644223640985, rel=1e-12)
        assert 0 <= diff <= middle <= envelope
        m0, m1, m2, m3 = rep.proxy_chain
        assert m0 == pytest.approx(22.481572981661614, rel=1e-12)
        assert m0 <= m1 <= m2
        assert m2 == pytest.approx(m3, rel=1e-12)
        assert rep.proxy_envelope_holds
        assert isinstance(middle, float) and isinstance(rep.exceptional_budget, float)

    def test_split_recip_by_hand(self, sine):
        # chi mod 5 is +1 exactly on residues 1 and 4
        b, c, coeffs = _ones_setup(1e8, 1.5)
        chi1 = character_group(5).character(2)
        exc = ExceptionalData(True, chi1, 0.9, -1)
        params = PipelineParams(q=5, a=2, x=1e8, lam=1.5)
        rep = component_bounds(params, b, b, coeffs, c, dict(c), sine, exc)
        hand = sum((1 + (1 if p % 5 in (1, 4) else -1)) / p for p in c)
        assert rep.split_recip_c == pytest.approx(hand, rel=1e-12)

    def test_grid_budget_sum(self, sine):
        x, lam, beta1 = 1e9, 1.2, 0.99
        grid = box_cover(x, lam)
        pairs = list(grid.pairs())
        assert len(pairs) == 16
        coeffs = TrioCoefficients.ones(x ** (1 / 6))
        chi1 = character_group(3).character(1)
        exc = ExceptionalData(True, chi1, beta1, -1)
        params = PipelineParams(q=3, a=2, x=x, lam=lam)
        top = max(max(b3.hi, b4.hi) for b3, b4 in pairs)
        ps = primes_upto(int(top) + 1)
        total = 0.0
        for b3, b4 in pairs:
            cc = {int(p): 1.0 for p in ps if b3.contains(int(p))}
            dd = {int(p): 1.0 for p in ps if b4.contains(int(p))}
            rep = component_bounds(params, b3, b4, coeffs, cc, dd, sine, exc)
            total += rep.exceptional_budget
        assert total == pytest.approx(0.09410376166890884, rel=1e-9)
        assert total <= (11 / 20) * (1 - beta1) * math.log(x)

    def test_sign_mismatch_rejected(self, sine):
        b, c, coeffs = _ones_setup(1e8, 1.5)
        chi1 = character_group(5).character(2)
        exc = ExceptionalData(True, chi1, 0.9, 1)  # chi1(2) is -1, not +1
        params = PipelineParams(q=5, a=2, x=1e8, lam=1.5)
        with pytest.raises(ValueError, match="sign at the residue"):
            component_bounds(params, b, b, coeffs, c, dict(c), sine, exc)

    def test_modulus_mismatch_rejected(self, sine):
        b, c, coeffs = _ones_setup(1e8, 1.5)
        chi3 = character_group(3).character(1)
        exc = ExceptionalData(True, chi3, 0.9, -1)
        params = PipelineParams(q=5, a=2, x=1e8, lam=1.5)
        with pytest.raises(ValueError, match="modulus"):
            component_bounds(params, b, b, coeffs, c, dict(c), sine, exc)


_ETA = 80 / 52600


class TestFloorCertificate:
    def test_no_exceptional_at_threshold(self):
        lx = (80 / _ETA) * math.log(5)
        params = PipelineParams(q=5, a=2, eta=_ETA, log_x=lx)
        cert = quintet_floor_certificate(params, ExceptionalData.none())
        assert cert.case == "no-exceptional"
        assert cert.lower_bound_value == math.inf
        names = [ck.name for ck in cert.conditions_checked]
        assert names[0] == "x-reaches-modulus-power"
        assert all(ck.holds for ck in cert.conditions_checked)
        # the input sits exactly on the threshold; the gate says so
        assert "boundary" in cert.conditions_checked[0].detail

    def test_finite_value(self, sine):
        cert = quintet_floor_certificate(
            PipelineParams(q=1, a=1, x=1e6), ExceptionalData.none()
        )
        assert cert.lower_bound_value == pytest.approx(0.13269224537280094, rel=1e-12)
        expect = sine.fhat0 * 1e6 / (350 * math.log(1e6))
        assert cert.lower_bound_value == pytest.approx(expect, rel=1e-12)
        assert math.exp(cert.log_lower_bound) == pytest.approx(
            cert.lower_bound_value, rel=1e-9
        )

    def test_large_x_route(self):
        chi1 = character_group(5).character(2)
        exc = ExceptionalData(True, chi1, 1 - 1e-6, -1)
        params = PipelineParams(q=5, a=2, eta=_ETA, log_x=8e7)
        cert = quintet_floor_certificate(params, exc)
        assert cert.case == "large-x"
        by_name = {ck.name: ck for ck in cert.conditions_checked}
        # the gap rounds to exactly 1e-6, so the product is exactly 80
        assert by_name["gap-times-logx-at-least-80"].holds
        assert "= 80" in by_name["gap-times-logx-at-least-80"].detail
        assert by_name["tail-below-1/42"].holds
        assert by_name["zero-inside-siegel-range"].holds

    def test_large_x_monotone(self):
        chi1 = character_group(5).character(2)
        exc = ExceptionalData(True, chi1, 1 - 1e-6, -1)
        for lx in (8e7, 1.6e8, 3.2e8, 1e12):
            cert = quintet_floor_certificate(
                PipelineParams(q=5, a=2, eta=_ETA, log_x=lx), exc
            )
            assert cert.case == "large-x"

    def test_chi1_negative_route(self):
        chi1 = character_group(5).character(2)
        beta1 = 1 - 1e-7
        exc = ExceptionalData(True, chi1, beta1, -1)
        params = PipelineParams(q=5, a=2, eta=_ETA, log_x=1 / (36 * (1 - beta1)))
        cert = quintet_floor_certificate(params, exc)
        assert cert.case == "chi1-negative"
        by_name = {ck.name: ck for ck in cert.conditions_checked}
        assert "= 0.5" in by_name["18-gap-logx-at-most-1"].detail

    def test_chi1_negative_boundary(self):
        # x exactly at the ceiling still passes
        chi1 = character_group(5).character(2)
        beta1 = 1 - 1e-7
        exc = ExceptionalData(True, chi1, beta1, -1)
        params = PipelineParams(q=5, a=2, eta=_ETA, log_x=1 / (18 * (1 - beta1)))
        assert quintet_floor_certificate(params, exc).case == "chi1-negative"

    def test_refusal_between_routes(self):
        chi1 = character_group(5).character(2)
        beta1 = 1 - 1e-7
        exc = ExceptionalData(True, chi1, beta1, 1)  # positive sign at a = 4
        params = PipelineParams(q=5, a=4, eta=_ETA, log_x=1 / (36 * (1 - beta1)))
        with pytest.raises(CertificateRefused) as err:
            quintet_floor_certificate(params, exc)
        assert "no route" in str(err.value)
        assert any(not ck.holds for ck in err.value.conditions)

    def test_selberg_axiom_route(self):
        chi1 = character_group(5).character(2)
        beta1 = 1 - 1e-7
        exc = ExceptionalData(True, chi1, beta1, 1)
        params = PipelineParams(q=5, a=4, eta=_ETA, log_x=1 / (36 * (1 - beta1)))
        cert = quintet_floor_certificate(params, exc, use_selberg_axiom=True)
        assert cert.case == "selberg-axiom"
        assert cert.lower_bound_value == 0.0
        names = [ck.name for ck in cert.conditions_checked]
        assert "outside-lower-bound-axiom" in names
        assert "4-gap-logx-at-most-1" in names

    def test_baseline_refusal(self):
        params = PipelineParams(q=5, a=2, eta=_ETA, log_x=100.0)
        with pytest.raises(CertificateRefused, match="baseline"):
            quintet_floor_certificate(params, ExceptionalData.none())

    def test_modulus_mismatch(self):
        chi3 = character_group(3).character(1)
        exc = ExceptionalData(True, chi3, 0.999999, -1)
        params = PipelineParams(q=5, a=2, eta=_ETA, log_x=8e7)
        with pytest.raises(ValueError, match="modulus"):
            quintet_floor_certificate(params, exc)


class TestLinnikExponent:
    def test_headline_value(self):
        rep = linnik_exponent(52600, 1 / 657.5)
        assert rep.exponent == 75_744_000
        assert isinstance(rep.exponent, int)

    def test_duo_gate_margin(self):
        rep = linnik_exponent(52600, 1 / 657.5)
        gate = rep.steps[0]
        assert gate.name == "duo-contribution-gate"
        assert gate.holds
        # 1.14074e-4 against 1/8750 = 1.14286e-4
        assert gate.margin == pytest.approx(2.1185149045810434e-07, rel=1e-6)

    def test_eta_exactly_at_level(self):
        # 1/657.5 is exactly 80/52600; the snap recovers the equality
        rep = linnik_exponent(52600, 1 / 657.5)
        step = {s.name: s for s in rep.steps}["zero-free-constant-covers-level"]
        assert step.holds and step.margin == 0.0

    def test_without_axiom(self):
        rep = linnik_exponent(52600, 1 / 657.5, use_selberg_axiom=False)
        assert rep.exponent is None
        needs = [c for c in rep.cases if c.requires_axiom]
        assert [c.name for c in needs] == ["deep-zero-positive"]
        assert {c.name for c in rep.cases} == {
            "no-exceptional",
            "moderate-zero",
            "deep-zero-negative",
            "deep-zero-positive",
        }

    def test_worst_case_is_moderate_zero(self):
        rep = linnik_exponent(52600, 1 / 657.5)
        by_name = {c.name: c for c in rep.cases}
        assert by_name["moderate-zero"].exponent == 75_744_000
        assert by_name["no-exceptional"].exponent == 52600
        assert by_name["deep-zero-negative"].exponent == 52600

    def test_small_level_refused(self):
        with pytest.raises(CertificateRefused, match="duo gate"):
            linnik_exponent(1000, 1 / 657.5)

    def test_eta_readings(self):
        assert linnik_exponent(52600, 1 / 657).exponent == 75_744_000
        with pytest.raises(CertificateRefused, match="below 80/level"):
            linnik_exponent(52600, 1 / 675.5)
        assert linnik_exponent(54040, 1 / 675.5).exponent == 80 * 18 * 54040

    def test_validation(self):
        with pytest.raises(ValueError):
            linnik_exponent(3, 0.01)
        with pytest.raises(ValueError):
            linnik_exponent(52600, 0.0)

    def test_bookkeeping_steps(self):
        rep = linnik_exponent(52600, 1 / 657.5)
        names = [s.name for s in rep.steps]
        assert "duo-fraction-identity" in names
        assert "axiom-window-start" in names
        assert all(s.holds for s in rep.steps)


class TestConstantSkeleton:
    def test_all_hold(self):
        checks = constant_skeleton()
        assert len(checks) == 10
        assert all(ck.holds for ck in checks)

    def test_specific_margins(self):
        by_name = {ck.name: ck for ck in constant_skeleton()}
        rest = by_name["rest-coefficient"]
        assert rest.rhs == 800 and rest.lhs == 801
        tight = by_name["exceptional-ceiling-tight"]
        assert tight.lhs == Fraction(4, 5)
        assert by_name["exponent-product"].rhs == 75_744_000
