"""Crop weights: smooth bump functions on [1, 2] that taper the raw count.

A crop feeds two consumers with different needs.  The analytic pipeline
wants certified derivative bounds (all of |f|..|f''''| at most 1) and the
Mellin transform; the exact test harness wants integer arithmetic, which the
sharp indicator provides.  The default is c*sin^2(pi(u-1)) with c = 1/(8 pi^4),
chosen so the fourth derivative bound is exactly 1 and everything downstream
has a closed form, including progression sums via a Dirichlet kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .arith.primes import count_progression, first_in_progression

_C_SINE = 1.0 / (8 * math.pi**4)


def _masked_eval(fn, u, lo, hi, closed_left=False):
    arr = np.asarray(u, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    inside = (flat >= lo) if closed_left else (flat > lo)
    inside &= flat <= hi
    out = np.zeros_like(flat)
    if inside.any():
        out[inside] = fn(flat[inside])
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class CropFunction:
    name: str
    smooth: bool
    fhat0: float
    derivative_bounds: tuple[float, ...]  # certified max of |f^(j)|, j = 0..4
    abs_slope_integral: float  # integral of u*|f'(u)| du over the support
    _f: Callable[[np.ndarray], np.ndarray]
    _derivs: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()
    _cumulative_abs_slope: Callable[[float], float] | None = None
    _mellin_closed: Callable[[complex], complex] | None = None
    _fourier: bool = False  # sin^2 shape: progression sums via Dirichlet kernel
    support: tuple[float, float] = (1.0, 2.0)

    def __call__(self, u):
        return _masked_eval(self._f, u, *self.support)

    def derivative(self, u, order: int = 1):
        if not self.smooth:
            raise ValueError(f"{self.name} crop has no derivatives")
        if not 1 <= order <= 4:
            raise ValueError("order must be 1..4")
        return _masked_eval(self._derivs[order - 1], u, *self.support)

    def mellin(self, s: complex) -> tuple[complex, float]:
        """f~(s) = integral of f(y) y^(s-1) dy, with a quadrature error bound."""
        s = complex(s)
        if self._mellin_closed is not None:
            return self._mellin_closed(s), 0.0
        lo, hi = self.support

        def fval(y):
            return float(self._f(np.atleast_1d(np.float64(y)))[0])

        re, re_err = quad(lambda y: fval(y) * y ** (s.real - 1) * math.cos(s.imag * math.log(y)), lo, hi, limit=200)
        im, im_err = quad(lambda y: fval(y) * y ** (s.real - 1) * math.sin(s.imag * math.log(y)), lo, hi, limit=200)
        return complex(re, im), float(re_err + im_err)

    def cumulative_abs_slope(self, v: float) -> float:
        """A(v) = integral from support start to v of |f'(w)| dw, clamped to the support."""
        if not self.smooth:
            raise ValueError(f"{self.name} crop has no derivatives")
        lo, hi = self.support
        v = min(max(v, lo), hi)
        if self._cumulative_abs_slope is not None:
            return self._cumulative_abs_slope(v)
        val, _ = quad(lambda w: abs(float(self.derivative(w))), lo, v, limit=200)
        return float(val)

    def congruence_weight_sum(self, x: float, step: int, r: int) -> float | None:
        """Sum of f(n/x) over n in (x, 2x] with n = r (mod step).

        Returns None when this crop shape has no fast path; callers then fall
        back to enumeration.
        """
        lo, hi = math.floor(x), math.floor(2 * x)
        k = count_progression(lo, hi, step, r)
        if k == 0:
            return 0.0
        if self.name == "sharp":
            return float(k)
        if not self._fourier:
            return None
        n0 = first_in_progression(lo, step, r)
        if k <= 8:
            return float(np.sum(self((n0 + step * np.arange(k)) / x)))
        # f(n/x) = c/2 - (c/2) cos(2 pi n/x); the cosine part sums to a
        # Dirichlet kernel over the progression
        theta = 2 * math.pi * step / x
        phase = 2 * math.pi * n0 / x
        half = theta / 2
        series = cmath.exp(1j * (phase + (k - 1) * half)) * math.sin(k * half) / math.sin(half)
        return _C_SINE / 2 * k - _C_SINE / 2 * series.real


def _sine_cumulative(v: float) -> float:
    # integral of c*pi*|sin(2 pi t)| dt for t from 0 to v-1
    t = min(max(v - 1.0, 0.0), 1.0)
    whole, frac = divmod(t, 0.5)
    return _C_SINE * math.pi * (whole / math.pi + (1 - math.cos(2 * math.pi * frac)) / (2 * math.pi))


@lru_cache(maxsize=None)
def sine_crop() -> CropFunction:
    c = _C_SINE
    pi = math.pi
    return CropFunction(
        name="sine2",
        smooth=True,
        fhat0=c / 2,
        derivative_bounds=(c, c * pi, 2 * c * pi**2, 4 * c * pi**3, 1.0),
        abs_slope_integral=3 * c,
        _f=lambda u: c * np.sin(pi * (u - 1)) ** 2,
        _derivs=(
            lambda u: c * pi * np.sin(2 * pi * (u - 1)),
            lambda u: 2 * c * pi**2 * np.cos(2 * pi * (u - 1)),
            lambda u: -4 * c * pi**3 * np.sin(2 * pi * (u - 1)),
            lambda u: -8 * c * pi**4 * np.cos(2 * pi * (u - 1)),
        ),
        _cumulative_abs_slope=_sine_cumulative,
        _fourier=True,
    )


def _sharp_mellin(s: complex) -> complex:
    if abs(s) < 1e-12:
        return complex(math.log(2))
    return (2**s - 1) / s


@lru_cache(maxsize=None)
def sharp_crop() -> CropFunction:
    return CropFunction(
        name="sharp",
        smooth=False,
        fhat0=1.0,
        derivative_bounds=(1.0, math.inf, math.inf, math.inf, math.inf),
        abs_slope_integral=math.nan,
        _f=lambda u: np.ones_like(u),
        _mellin_closed=_sharp_mellin,
    )


def _safe(fn):
    def wrapped(arr):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.asarray(fn(arr), dtype=np.float64)
        return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)

    return wrapped


def _bump_scale() -> tuple[float, tuple[float, ...]]:
    """Scale for the C-infinity bump so |f^(j)| <= 1 for j <= 4.

    Grid maxima are stiffened by a midpoint correction using the next
    derivative up as a Lipschitz constant; the certification is numerical,
    not interval-rigorous, and the grid pitch is recorded here (2.5e-5).
    """
    import sympy

    u = sympy.Symbol("u")
    base = sympy.exp(-1 / ((u - 1) * (2 - u)))
    funcs = [_safe(sympy.lambdify(u, sympy.diff(base, u, j), "numpy")) for j in range(6)]
    grid = np.linspace(1 + 1e-9, 2 - 1e-9, 40001)
    step = float(grid[1] - grid[0])
    maxima = [float(np.max(np.abs(fn(grid)))) for fn in funcs]
    certified = tuple(maxima[j] + 0.5 * step * maxima[j + 1] * 1.05 for j in range(5))
    scale = 0.999 / max(certified)
    return scale, tuple(min(scale * b, 1.0) for b in certified)


@lru_cache(maxsize=None)
def bump_crop() -> CropFunction:
    import sympy

    scale, bounds = _bump_scale()
    u = sympy.Symbol("u")
    base = scale * sympy.exp(-1 / ((u - 1) * (2 - u)))
    f = _safe(sympy.lambdify(u, base, "numpy"))
    derivs = tuple(
        _safe(sympy.lambdify(u, sympy.diff(base, u, j), "numpy")) for j in range(1, 5)
    )
    fhat0, _ = quad(lambda y: float(f(np.atleast_1d(np.float64(y)))[0]), 1, 2, limit=200)
    slope_int, _ = quad(
        lambda y: y * abs(float(derivs[0](np.atleast_1d(np.float64(y)))[0])), 1, 2, limit=200
    )
    return CropFunction(
        name="bump",
        smooth=True,
        fhat0=float(fhat0),
        derivative_bounds=bounds,
        abs_slope_integral=float(slope_int),
        _f=f,
        _derivs=derivs,
    )


_CROPS = {"sine2": sine_crop, "sharp": sharp_crop, "bump": bump_crop}


def get_crop(name: str) -> CropFunction:
    try:
        factory = _CROPS[name]
    except KeyError:
        raise ValueError(f"unknown crop {name!r}; choose from {sorted(_CROPS)}") from None
    return factory()
