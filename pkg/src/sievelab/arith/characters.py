"""Dirichlet characters with exact values.

The unit group mod q is represented through generators of its cyclic
components (smallest primitive roots for odd prime powers, lifted so they
stay primitive for all powers; <-1, 5> for the 2-power part), glued by CRT.
A character is an exponent vector on those generators; its values are exact
roots of unity stored as rational angles, with float conversion on demand.

Character labeling: index = mixed-radix encoding of the exponent vector,
first component slowest, components ordered 2-part first then odd primes
ascending.  Index 0 is the principal character.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .primes import euler_phi, factorize

_MODULUS_CAP = 2_000_000


class CharValue:
    """Exact character value: a root of unity exp(2*pi*i*angle) or zero (angle None)."""

    __slots__ = ("angle",)

    def __init__(self, angle: Fraction | None):
        if angle is not None:
            angle = angle % 1
        self.angle = angle

    @property
    def is_zero(self) -> bool:
        return self.angle is None

    def as_complex(self) -> complex:
        if self.angle is None:
            return 0j
        return complex(np.exp(2j * np.pi * float(self.angle)))

    def as_real_int(self) -> int:
        """The value as an integer, valid only for values in {0, 1, -1}."""
        if self.angle is None:
            return 0
        if self.angle == 0:
            return 1
        if self.angle == Fraction(1, 2):
            return -1
        raise ValueError(f"value exp(2*pi*i*{self.angle}) is not real")

    def conjugate(self) -> "CharValue":
        if self.angle is None:
            return self
        return CharValue(-self.angle)

    def __mul__(self, other: "CharValue") -> "CharValue":
        if self.angle is None or other.angle is None:
            return CharValue(None)
        return CharValue(self.angle + other.angle)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CharValue) and self.angle == other.angle

    def __hash__(self) -> int:
        return hash(("CharValue", self.angle))

    def __repr__(self) -> str:
        if self.angle is None:
            return "CharValue(0)"
        return f"CharValue(e(2pi*{self.angle}))"


def _primitive_root_mod_p(p: int) -> int:
    if p == 2:
        return 1
    fac = [f for f, _ in factorize(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // f, p) != 1 for f in fac):
            return g
        g += 1


def _odd_prime_power_generator(p: int, k: int) -> int:
    g = _primitive_root_mod_p(p)
    if k >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _crt_lift(g: int, m: int, q: int) -> int:
    """Residue mod q congruent to g mod m and to 1 mod q//m."""
    rest = q // m
    if rest == 1:
        return g % q
    inv = pow(rest % m, -1, m)
    return (1 + (g - 1) * rest * inv) % q


def _power_table(g: int, s: int, q: int) -> np.ndarray:
    """[g^0, g^1, ..., g^(s-1)] mod q, blocked so the Python loop stays short."""
    block = min(s, 256)
    small = np.empty(block, dtype=np.int64)
    small[0] = 1
    for e in range(1, block):
        small[e] = small[e - 1] * g % q
    nblocks = -(-s // block)
    big = np.empty(nblocks, dtype=np.int64)
    big[0] = 1
    gb = pow(g, block, q)
    for e in range(1, nblocks):
        big[e] = big[e - 1] * gb % q
    return ((big[:, None] * small[None, :]) % q).reshape(-1)[:s]


@dataclass
class UnitGroupStructure:
    """Cyclic decomposition of (Z/q)^* with per-residue discrete logs."""

    modulus: int
    orders: tuple[int, ...]
    generators: tuple[int, ...]
    exponent: int
    units: np.ndarray  # residues, indexed by mixed-radix exponent vector
    dlog: np.ndarray  # residue -> flat mixed-radix index, -1 for non-units
    _exp_matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return int(self.units.size)

    def exponent_matrix(self) -> np.ndarray:
        """Row i = exponent vector of the unit with flat index i (order x ncomp)."""
        if self._exp_matrix is None:
            if not self.orders:
                self._exp_matrix = np.zeros((self.order, 0), dtype=np.int64)
            else:
                idx = np.unravel_index(np.arange(self.order), self.orders)
                self._exp_matrix = np.stack(idx, axis=1).astype(np.int64)
        return self._exp_matrix

    def decompose(self, n: int) -> tuple[int, ...] | None:
        r = n % self.modulus
        flat = int(self.dlog[r]) if self.modulus > 1 else 0
        if flat < 0:
            return None
        if not self.orders:
            return ()
        return tuple(int(v) for v in np.unravel_index(flat, self.orders))


@lru_cache(maxsize=256)
def unit_structure(q: int) -> UnitGroupStructure:
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q > _MODULUS_CAP:
        raise ValueError(f"modulus above supported bound {_MODULUS_CAP}")
    if q == 1:
        return UnitGroupStructure(1, (), (), 1, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))
    comps: list[tuple[int, int]] = []  # (generator mod q, order)
    fac = factorize(q)
    for p, k in fac:
        if p != 2:
            continue
        if k == 1:
            continue
        if k == 2:
            comps.append((_crt_lift(3, 4, q), 2))
        else:
            m = 1 << k
            comps.append((_crt_lift(m - 1, m, q), 2))
            comps.append((_crt_lift(5, m, q), 1 << (k - 2)))
    for p, k in fac:
        if p == 2:
            continue
        m = p**k
        g = _odd_prime_power_generator(p, k)
        comps.append((_crt_lift(g, m, q), (p - 1) * p ** (k - 1)))
    orders = tuple(s for _, s in comps)
    gens = tuple(g for g, _ in comps)
    exponent = math.lcm(*orders) if orders else 1
    acc = np.ones(1, dtype=np.int64)
    for g, s in comps:
        pw = _power_table(g, s, q)
        acc = ((acc[:, None] * pw[None, :]) % q).reshape(-1)
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[acc] = np.arange(acc.size)
    st = UnitGroupStructure(q, orders, gens, exponent, acc, dlog)
    assert st.order == euler_phi(q)
    return st


class DirichletCharacter:
    """One character mod q, identified by its exponent vector on the fixed generators."""

    def __init__(self, structure: UnitGroupStructure, index: int):
        self.structure = structure
        self.modulus = structure.modulus
        if not 0 <= index < structure.order:
            raise ValueError("character index out of range")
        self.index = index
        if structure.orders:
            self.exponents = tuple(
                int(v) for v in np.unravel_index(index, structure.orders)
            )
        else:
            self.exponents = ()
        self._table: np.ndarray | None = None

    @property
    def is_principal(self) -> bool:
        return all(j == 0 for j in self.exponents)

    @property
    def is_real(self) -> bool:
        return all(2 * j % s == 0 for j, s in zip(self.exponents, self.structure.orders))

    @property
    def order(self) -> int:
        parts = [
            s // math.gcd(s, j) for j, s in zip(self.exponents, self.structure.orders)
        ]
        return math.lcm(*parts) if parts else 1

    def angle_units(self, n: int) -> int | None:
        """Angle of chi(n) in units of 2*pi/exponent, or None when chi(n) = 0."""
        st = self.structure
        vec = st.decompose(n)
        if vec is None:
            return None
        total = 0
        for j, t, s in zip(self.exponents, vec, st.orders):
            total += j * t * (st.exponent // s)
        return total % st.exponent

    def eval_exact(self, n: int) -> CharValue:
        u = self.angle_units(n)
        if u is None:
            return CharValue(None)
        return CharValue(Fraction(u, self.structure.exponent))

    def angle_table(self) -> np.ndarray:
        """Per-residue angle in units of 2*pi/exponent; -1 where chi vanishes."""
        st = self.structure
        out = np.full(st.modulus if st.modulus > 1 else 1, -1, dtype=np.int64)
        if st.orders:
            scale = np.array(
                [j * (st.exponent // s) for j, s in zip(self.exponents, st.orders)],
                dtype=np.int64,
            )
            angles = st.exponent_matrix() @ scale % st.exponent
        else:
            angles = np.zeros(st.order, dtype=np.int64)
        out[st.units] = angles
        return out

    def value_table(self) -> np.ndarray:
        """Complex128 array of length q: chi(r) for each residue r."""
        if self._table is None:
            ang = self.angle_table()
            tab = np.zeros(ang.size, dtype=np.complex128)
            ok = ang >= 0
            tab[ok] = np.exp(2j * np.pi * ang[ok] / self.structure.exponent)
            self._table = tab
        return self._table

    def real_table(self) -> np.ndarray:
        """Int8 array of chi values for a real character."""
        if not self.is_real:
            raise ValueError("character is not real")
        ang = self.angle_table()
        tab = np.zeros(ang.size, dtype=np.int8)
        tab[ang == 0] = 1
        if self.structure.exponent % 2 == 0:
            tab[ang == self.structure.exponent // 2] = -1
        return tab

    def conjugate(self) -> "DirichletCharacter":
        """The character whose values are the complex conjugates of this one's."""
        st = self.structure
        if not st.orders:
            return self
        neg = tuple((-j) % s for j, s in zip(self.exponents, st.orders))
        return DirichletCharacter(st, int(np.ravel_multi_index(neg, st.orders)))

    def __call__(self, n: int) -> complex:
        return complex(self.value_table()[n % self.modulus]) if self.modulus > 1 else 1 + 0j

    def __repr__(self) -> str:
        return f"DirichletCharacter(mod {self.modulus}, index {self.index})"


class CharacterGroup:
    """All phi(q) Dirichlet characters mod q."""

    def __init__(self, structure: UnitGroupStructure):
        self.structure = structure
        self.modulus = structure.modulus
        self._chars: dict[int, DirichletCharacter] = {}

    def __len__(self) -> int:
        return self.structure.order

    def character(self, index: int) -> DirichletCharacter:
        if index not in self._chars:
            self._chars[index] = DirichletCharacter(self.structure, index)
        return self._chars[index]

    def __iter__(self) -> Iterator[DirichletCharacter]:
        return (self.character(i) for i in range(len(self)))

    @property
    def principal(self) -> DirichletCharacter:
        return self.character(0)

    def real_characters(self) -> list[DirichletCharacter]:
        out = []
        for idx in _real_indices(self.structure):
            out.append(self.character(idx))
        return out


def _real_indices(st: UnitGroupStructure) -> list[int]:
    choices: list[list[int]] = [[0, s // 2] if s % 2 == 0 else [0] for s in st.orders]
    idxs = [0]
    for s, ch in zip(st.orders, choices):
        idxs = [i * s + c for i in idxs for c in ch]
    return sorted(idxs)


def character_group(q: int) -> CharacterGroup:
    return CharacterGroup(unit_structure(q))


def character_eval(chi: DirichletCharacter, n: int) -> CharValue:
    """Exact value chi(n); zero exactly when gcd(n, q) > 1 (and 1 identically for q = 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return chi.eval_exact(n)


def real_value_tables(q: int) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """(exponents, int8 value table) for every real character mod q.

    Cheaper than instantiating the whole group when only real characters are
    needed (large-q sweeps).
    """
    st = unit_structure(q)
    out = []
    T = st.exponent_matrix()
    for idx in _real_indices(st):
        if st.orders:
            vec = tuple(int(v) for v in np.unravel_index(idx, st.orders))
        else:
            vec = ()
        sel = np.array(
            [1 if (s % 2 == 0 and j == s // 2) else 0 for j, s in zip(vec, st.orders)],
            dtype=np.int64,
        )
        parity = (T @ sel) % 2 if st.orders else np.zeros(st.order, dtype=np.int64)
        tab = np.zeros(max(q, 1), dtype=np.int8)
        tab[st.units] = 1 - 2 * parity.astype(np.int8)
        out.append((vec, tab))
    return out


def _unit_orders(st: UnitGroupStructure) -> np.ndarray:
    """Multiplicative order of every unit, aligned with flat index."""
    T = st.exponent_matrix()
    out = np.ones(st.order, dtype=np.int64)
    for col, s in enumerate(st.orders):
        g = np.gcd(T[:, col], s)
        out = np.lcm(out, s // g)
    return out


def verify_orthogonality(
    group: CharacterGroup, pair_samples: int = 32, seed: int = 0
) -> dict:
    """Exact orthogonality audit of a character group.

    For every unit m the multiset {chi(m) : chi} is checked, in integer angle
    arithmetic, to consist of each d-th root of unity exactly phi/d times,
    d = ord(m); the sum is then phi for m = 1 and 0 otherwise, which is the
    orthogonality relation.  A sample of (a, n) pairs is additionally checked
    directly through angle differences, without routing through n * a^{-1}.
    """
    st = group.structure
    q, phi, n_exp = st.modulus, st.order, st.exponent
    report = {"q": q, "order": phi, "pairs_checked": 0, "ok": True, "failures": []}
    if q == 1 or phi == 1:
        return report
    T = st.exponent_matrix()
    scale = np.array([n_exp // s for s in st.orders], dtype=np.int64)
    A = (T * scale) @ T.T % n_exp  # A[m, c] = angle of chi_c at unit m
    orders = _unit_orders(st)

    def _uniform_root_multiset(angles: np.ndarray, d: int) -> bool:
        counts = np.bincount(angles, minlength=n_exp)
        if d * (phi // d) != phi:
            return False
        step = n_exp // d
        expect = np.zeros(n_exp, dtype=counts.dtype)
        expect[::step] = phi // d
        return bool(np.array_equal(counts, expect))

    for m in range(phi):
        d = int(orders[m])
        if not _uniform_root_multiset(A[m], d):
            report["ok"] = False
            report["failures"].append(("unit", int(st.units[m])))
    rng = np.random.default_rng(seed)
    for _ in range(pair_samples):
        ia, im = rng.integers(0, phi, size=2)
        diff = (A[im] - A[ia]) % n_exp
        prod = int(st.units[im]) * pow(int(st.units[ia]), -1, q) % q
        d = int(orders[st.dlog[prod]])
        if not _uniform_root_multiset(diff, d):
            report["ok"] = False
            report["failures"].append(("pair", int(st.units[ia]), int(st.units[im])))
        report["pairs_checked"] += 1
    return report
