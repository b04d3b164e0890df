import math

import numpy as np
import pytest
from scipy.integrate import quad

from sievelab.crops import bump_crop, get_crop, sharp_crop, sine_crop

C = 1.0 / (8 * math.pi**4)


class TestSineCrop:
    def test_closed_form_constants(self):
        f = sine_crop()
        assert f.fhat0 == pytest.approx(1.0 / (16 * math.pi**4), rel=1e-15)
        assert f.abs_slope_integral == pytest.approx(3 * C, rel=1e-15)

    def test_mass_matches_quadrature(self):
        f = sine_crop()
        val, err = quad(lambda u: f(u), 1, 2)
        assert f.fhat0 == pytest.approx(val, abs=1e-12)

    def test_support(self):
        f = sine_crop()
        assert f(0.99) == 0
        assert f(1.0) == 0
        assert f(2.0) == pytest.approx(C * math.sin(math.pi) ** 2, abs=1e-18)
        assert f(2.01) == 0
        assert f(1.5) == pytest.approx(C, rel=1e-15)

    def test_derivative_bounds_attained(self):
        f = sine_crop()
        us = np.linspace(1, 2, 4001)
        for order in range(1, 5):
            vals = np.abs(f.derivative(us, order))
            bound = f.derivative_bounds[order]
            assert vals.max() <= bound * (1 + 1e-12)
            assert vals.max() == pytest.approx(bound, rel=1e-6)

    def test_cumulative_abs_slope_vs_quadrature(self):
        f = sine_crop()
        for v in (1.0, 1.2, 1.25, 1.5, 1.75, 1.9, 2.0):
            pts = [1.5] if v > 1.5 else None
            ref, _ = quad(lambda u: abs(f.derivative(u, 1)), 1, v, limit=200, points=pts)
            assert f.cumulative_abs_slope(v) == pytest.approx(ref, abs=1e-12)
        assert f.cumulative_abs_slope(0.5) == 0
        assert f.cumulative_abs_slope(3.0) == pytest.approx(2 * C, rel=1e-15)

    def test_weighted_slope_integral(self):
        f = sine_crop()
        ref, _ = quad(lambda u: u * abs(f.derivative(u, 1)), 1, 2, limit=200, points=[1.5])
        assert f.abs_slope_integral == pytest.approx(ref, abs=1e-14)
        assert f.abs_slope_integral == pytest.approx(3 * C, rel=1e-15)

    def test_progression_sum_vs_enumeration(self):
        f = sine_crop()
        x = 12345.0
        lo, hi = 12345, 24690
        for step, r in ((1, 0), (7, 3), (30, 11), (997, 1), (6000, 5999)):
            ns = np.arange(lo + 1, hi + 1)
            sel = ns % step == r % step
            ref = float(np.sum(f(ns[sel] / x)))
            got = f.congruence_weight_sum(x, step, r)
            assert got == pytest.approx(ref, abs=1e-9)

    def test_progression_sum_tracks_density(self):
        f = sine_crop()
        x = 1e9
        total = f.congruence_weight_sum(x, 21, 5)
        assert total == pytest.approx(f.fhat0 * x / 21, rel=1e-9)


class TestSharpCrop:
    def test_is_indicator(self):
        f = sharp_crop()
        assert f(1.0) == 0
        assert f(1.0000001) == 1
        assert f(2.0) == 1
        assert f(2.0000001) == 0
        assert f.fhat0 == 1.0

    def test_progression_sum_is_exact_count(self):
        f = sharp_crop()
        got = f.congruence_weight_sum(100.0, 3, 1)
        ns = [n for n in range(101, 201) if n % 3 == 1]
        assert got == len(ns) == 33

    def test_mellin_closed_form(self):
        f = sharp_crop()
        val, err = f.mellin(1.0)
        assert val == pytest.approx(1.0, abs=1e-12)
        val0, _ = f.mellin(0.0)
        assert val0 == pytest.approx(math.log(2), abs=1e-12)
        val2, _ = f.mellin(2.0)
        assert val2 == pytest.approx(1.5, abs=1e-12)


class TestBumpCrop:
    def test_certified_bounds_hold(self):
        f = bump_crop()
        us = np.linspace(1.0001, 1.9999, 2000)
        assert np.max(f(us)) <= f.derivative_bounds[0]
        for order in range(1, 5):
            vals = np.abs(f.derivative(us, order))
            assert np.max(vals) <= f.derivative_bounds[order] * (1 + 1e-9)
        assert all(b <= 1 for b in f.derivative_bounds)

    def test_mass_positive_and_small(self):
        f = bump_crop()
        assert 0 < f.fhat0 < 1e-3
        val, _ = quad(lambda u: f(u), 1, 2)
        assert f.fhat0 == pytest.approx(val, rel=1e-9)

    def test_support_vanishing(self):
        f = bump_crop()
        assert f(1.0) == 0
        assert f(2.0) == 0
        assert f(1.5) > 0


class TestMellinBound:
    @pytest.mark.parametrize("name", ["sine2", "bump"])
    def test_transform_bounded_by_mass(self, name):
        f = get_crop(name)
        for sigma in (0.0, 0.25, 0.5, 1.0):
            for t in (0.0, 1.0, 5.0, 20.0):
                s = complex(sigma, t)
                val, err = f.mellin(s)
                assert abs(val) <= f.fhat0 * 2.0**sigma + err + 1e-12


class TestRegistry:
    def test_known_names(self):
        assert get_crop("sine2") is sine_crop()
        assert get_crop("sharp") is sharp_crop()
        assert get_crop("bump") is bump_crop()

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown crop"):
            get_crop("gaussian")
