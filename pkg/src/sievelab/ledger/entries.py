"""Certified verdicts for the fixed numeric constants of the bound pipeline.

Every constant-level inequality the pipeline leans on is re-proved here from
scratch: rational identities by exact Fraction arithmetic, transcendental
ones by interval enclosures refined until the margin is certified to twelve
digits.  A verdict is "pass" only when the interval endpoints decide the
relation strictly; anything else is "fail" or "undecided", never rounded
into a pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import sympy

from .intervals import (
    IntervalNumber,
    exp_interval,
    log_interval,
    pi_interval,
    sin_interval,
)

EX = IntervalNumber.exact
F = Fraction

PASS = "pass"
FAIL = "fail"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class Comparison:
    label: str
    relation: str  # "<", "<=", "="
    lhs: IntervalNumber
    rhs: IntervalNumber
    exact: bool = False

    def decide(self) -> tuple[str, Fraction | None]:
        """(verdict, certified margin); margin is rhs - lhs at the worst endpoints."""
        lhs, rhs = self.lhs, self.rhs
        if self.relation == "=":
            if self.exact and lhs.lo == lhs.hi == rhs.lo == rhs.hi:
                return PASS, F(0)
            if lhs.hi < rhs.lo or rhs.hi < lhs.lo:
                gap = max(rhs.lo - lhs.hi, lhs.lo - rhs.hi)
                return FAIL, -gap
            return (FAIL, lhs.mid - rhs.mid) if self.exact else (UNDECIDED, None)
        if self.relation not in ("<", "<="):
            raise ValueError(f"unknown relation {self.relation!r}")
        if lhs.hi < rhs.lo or (self.relation == "<=" and lhs.hi <= rhs.lo):
            return PASS, rhs.lo - lhs.hi
        if lhs.lo > rhs.hi or (self.relation == "<" and lhs.lo >= rhs.hi):
            return FAIL, rhs.hi - lhs.lo
        return UNDECIDED, None


@dataclass
class LedgerEntry:
    id: str
    statement: str
    relation: str
    lhs: IntervalNumber
    rhs: IntervalNumber
    verdict: str
    margin: Fraction | None
    width: Fraction
    precision_bits: int
    detail: str = ""

    @property
    def margin_float(self) -> float | None:
        return None if self.margin is None else float(self.margin)


Builder = Callable[[int], list[Comparison]]


def _l0(prec: int) -> list[Comparison]:
    pi = pi_interval(prec)
    s = sin_interval(pi * F(1, 20), prec)
    return [Comparison("41*sin(pi/20)^2 >= 1", "<=", EX(1), 41 * s**2)]


_PI_POLY_LHS = 1 + 2 * sympy.Symbol("t") ** 2 + sympy.Rational(1, 2) + 4 * sympy.Symbol("t")
_PI_POLY_RHS = 2 * (sympy.Symbol("t") + sympy.Rational(1, 2)) * (sympy.Symbol("t") + sympy.Rational(3, 2))


def _l1(prec: int) -> list[Comparison]:
    # both sides expand to 2t^2 + 4t + 3/2, so as functions of pi they are
    # identical; a strict inequality between them cannot hold
    diff = sympy.expand(_PI_POLY_RHS - _PI_POLY_LHS)
    same = diff == 0
    pi = pi_interval(prec)
    val = F(3, 2) + 4 * pi + 2 * pi**2
    witness = EX(0) if same else EX(1)
    return [
        Comparison("expansions of both sides coincide", "=", witness, EX(0), exact=True),
        Comparison("shared value is finite and positive", "<", EX(0), val),
    ]


def _l2(prec: int) -> list[Comparison]:
    pi = pi_interval(prec)
    return [Comparison("41*(3/2 + 4pi + 2pi^2) <= 1387", "<=", 41 * (F(3, 2) + 4 * pi + 2 * pi**2), EX(1387))]


def _l3(prec: int) -> list[Comparison]:
    return [Comparison("1387*3001/2000 < 2082", "<", EX(F(1387 * 3001, 2000)), EX(2082), exact=True)]


def _l4(prec: int) -> list[Comparison]:
    return [Comparison("2082*log(6/5) < 380", "<", 2082 * log_interval(F(6, 5), prec), EX(380))]


def _l5(prec: int) -> list[Comparison]:
    lhs = F(64, 5) * log_interval(F(6, 5), prec)
    return [Comparison("(4*16/5)*log(6/5) <= 12/5", "<=", lhs, EX(F(12, 5)))]


def _l6(prec: int) -> list[Comparison]:
    lg = log_interval(F(6, 5), prec)
    return [Comparison("12*log(6/5)^2 + (4/5)*log(6/5) <= 11/20", "<=", 12 * lg**2 + F(4, 5) * lg, EX(F(11, 20)))]


def _l7(prec: int) -> list[Comparison]:
    return [Comparison("380*2*20/19 <= 801", "<=", EX(F(380 * 2 * 20, 19)), EX(801), exact=True)]


def _l8(prec: int) -> list[Comparison]:
    sq = log_interval(F(6, 5), prec) ** 2
    return [
        Comparison("1/31 < log(6/5)^2", "<", EX(F(1, 31)), sq),
        Comparison("log(6/5)^2 < 1/30", "<", sq, EX(F(1, 30))),
    ]


def _l9(prec: int) -> list[Comparison]:
    lhs = F(801, 25) * exp_interval(-F(40, 3), prec)
    return [
        Comparison("(801/25)*exp(-80/6) < 1/19270", "<", lhs, EX(F(1, 19270))),
        Comparison("1/19270 < 1/(961*20)", "<", EX(F(1, 19270)), EX(F(1, 961 * 20)), exact=True),
    ]


def _l10(prec: int) -> list[Comparison]:
    return [Comparison("380*961/25 <= 14608", "<=", EX(F(380 * 961, 25)), EX(14608), exact=True)]


def _l11(prec: int) -> list[Comparison]:
    lhs = 14608 * exp_interval(-F(40, 3), prec)
    return [Comparison("14608*exp(-80/6) < 1/42", "<", lhs, EX(F(1, 42)))]


def _l12(prec: int) -> list[Comparison]:
    return [Comparison("321/350 < 19/20 - 1/42", "<", EX(F(321, 350)), EX(F(19, 20) - F(1, 42)), exact=True)]


def _excess_at(t: Fraction) -> Fraction:
    # (961*log(2 x^{1/3}) - 321*log x) / log 2 at x = 2^t; log 2 > 0 is
    # certified separately, so the sign of this rational decides the bound
    return 961 * (1 + t / 3) - 321 * t


def threshold_exponent(bits: int = 24) -> IntervalNumber:
    """Enclosure of the t where 961*log(2*x^(1/3)) = 321*log(x) at x = 2^t.

    The excess is strictly decreasing in t, so bisection brackets the unique
    root; above it the 321-bound holds.
    """
    lo, hi = F(1), F(10**6)
    assert _excess_at(lo) > 0 > _excess_at(hi)
    for _ in range(bits + 20):
        mid = (lo + hi) / 2
        if _excess_at(mid) > 0:
            lo = mid
        else:
            hi = mid
    return IntervalNumber(lo, hi)


def _l13(prec: int) -> list[Comparison]:
    t0 = threshold_exponent()
    return [
        Comparison("log 2 is positive", "<", EX(0), log_interval(2, prec)),
        Comparison("threshold exponent t0 <= 52600", "<=", EX(t0.hi), EX(52600)),
        Comparison("excess at t=52600 is <= 0: 961*52603/157800 <= 321", "<=", EX(F(961 * 52603, 157800)), EX(321), exact=True),
    ]


def _l14(prec: int) -> list[Comparison]:
    m = 52600
    lhs = F(2 * m, m - 1) * log_interval(F(m, m - 3), prec)
    return [Comparison("(2M/(M-1))*log(M/(M-3)) < 1/8750 at M=52600", "<", lhs, EX(F(1, 25 * 350)))]


def _l15(prec: int) -> list[Comparison]:
    lg = log_interval(F(6, 5), prec)
    u = F(5, 48) * lg**4
    gap = (1 - exp_interval(-u, prec)) * F(1, 2)
    return [Comparison("(1 - exp(-(5/48)*log(6/5)^4))/2 < 6e-5", "<", gap, EX(F(6, 100000)))]


def _l16(prec: int) -> list[Comparison]:
    return [Comparison("1/24 - 1/25 = 350/210000", "=", EX(F(1, 24) - F(1, 25)), EX(F(350, 210000)), exact=True)]


def _l17(prec: int) -> list[Comparison]:
    return [Comparison("80*18*52600 = 75744000", "=", EX(80 * 18 * 52600), EX(75_744_000), exact=True)]


def _l18(prec: int) -> list[Comparison]:
    eta = F(80, 52600)
    return [
        Comparison("80/52600 = 1/657.5", "=", EX(eta), EX(F(2, 1315)), exact=True),
        Comparison("1/675.5 < 80/52600", "<", EX(F(2, 1351)), EX(eta), exact=True),
        Comparison("80/52600 < 1/657", "<", EX(eta), EX(F(1, 657)), exact=True),
    ]


def _l19(prec: int) -> list[Comparison]:
    return [Comparison("321 < 350*(19/20 - 1/42)", "<", EX(321), EX(350 * (F(19, 20) - F(1, 42))), exact=True)]


_ENTRIES: list[tuple[str, str, Builder]] = [
    ("L0", "dual kernel stays >= 1 at the left edge of its plateau: 41*sin(pi/20)^2 >= 1", _l0),
    ("L1", "closed form 1 + 2pi^2 + 1/2 + 4pi = 2(pi+1/2)(pi+3/2) holds exactly (strict '<' is unsatisfiable)", _l1),
    ("L2", "41*(1 + 2pi^2 + 1/2 + 4pi) rounds up into 1387", _l2),
    ("L3", "1387*3001/2000 rounds up into 2082", _l3),
    ("L4", "2082*log(6/5) rounds up into 380", _l4),
    ("L5", "2*2*(6/5+2)*log(6/5) = 2.3337... stays under 12/5", _l5),
    ("L6", "12*log(6/5)^2 + (4/5)*log(6/5) stays under 11/20", _l6),
    ("L7", "380*2*20/19 = 800 stays under 801", _l7),
    ("L8", "log(6/5)^2 lies strictly between 1/31 and 1/30", _l8),
    ("L9", "(801/25)*exp(-80/6) < 1/19270 < 1/(961*20)", _l9),
    ("L10", "380*961/25 rounds up into 14608", _l10),
    ("L11", "14608*exp(-80/6) stays under 1/42", _l11),
    ("L12", "19/20 - 1/42 exceeds 321/350", _l12),
    ("L13", "961*log(2x^(1/3))/log(x) <= 321 once x >= 2^1441.5, hence for x >= q^52600, q >= 2", _l13),
    ("L14", "window-exponent gate at M=52600: (2M/(M-1))*log(M/(M-3)) < 1/8750", _l14),
    ("L15", "crop-degradation ceiling keeps the window exponent within 6e-5 of 1", _l15),
    ("L16", "1/24 - 1/25 = 350/210000 exactly", _l16),
    ("L17", "80*18*52600 = 75744000 exactly", _l17),
    ("L18", "80/52600 = 1/657.5, between the two published readings 1/675.5 and 1/657", _l18),
    ("L19", "350*(19/20 - 1/42) - 321 = 19/6 > 0", _l19),
]

_PRECISIONS = (96, 160, 256, 384)
_WIDTH_FACTOR = F(1, 10**12)


def _evaluate(eid: str, statement: str, builder: Builder, precisions: Sequence[int]) -> LedgerEntry:
    comps: list[Comparison] = []
    decided: list[tuple[str, Fraction | None]] = []
    prec = precisions[0]
    for prec in precisions:
        comps = builder(prec)
        decided = [c.decide() for c in comps]
        if any(v == UNDECIDED for v, _ in decided):
            continue
        width = max(max(c.lhs.width, c.rhs.width) for c in comps)
        margins = [m for _, m in decided]
        margin = min(margins)
        sharp = True
        for c, (_, m) in zip(comps, decided):
            w = max(c.lhs.width, c.rhs.width)
            if m == 0:
                sharp &= w == 0
            else:
                sharp &= w <= abs(m) * _WIDTH_FACTOR
        if not sharp:
            continue
        verdict = PASS if all(v == PASS for v, _ in decided) else FAIL
        binding = comps[margins.index(margin)]
        detail = "; ".join(
            f"{c.label}: {v}" + (f" (margin {float(m):.6e})" if m is not None else "")
            for c, (v, m) in zip(comps, decided)
        )
        return LedgerEntry(
            eid, statement, binding.relation, binding.lhs, binding.rhs,
            verdict, margin, width, prec, detail,
        )
    width = max(max(c.lhs.width, c.rhs.width) for c in comps)
    detail = "; ".join(f"{c.label}: {v}" for c, (v, _) in zip(comps, decided))
    return LedgerEntry(
        eid, statement, comps[0].relation, comps[0].lhs, comps[0].rhs,
        UNDECIDED, None, width, prec, detail,
    )


def run_ledger(precisions: Sequence[int] = _PRECISIONS) -> list[LedgerEntry]:
    """Evaluate all entries, refining precision until each is decided."""
    return [_evaluate(eid, stmt, b, precisions) for eid, stmt, b in _ENTRIES]


def all_pass(entries: Sequence[LedgerEntry]) -> bool:
    return all(e.verdict == PASS for e in entries)


def ledger_table(entries: Sequence[LedgerEntry]) -> str:
    lines = [f"{'id':<5} {'verdict':<10} {'margin':>13}  statement"]
    for e in entries:
        m = "-" if e.margin is None else f"{float(e.margin):.4e}"
        lines.append(f"{e.id:<5} {e.verdict:<10} {m:>13}  {e.statement}")
    return "\n".join(lines)
