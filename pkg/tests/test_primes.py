import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sievelab.arith import (
    PrimeRange,
    count_progression,
    euler_phi,
    factorize,
    first_in_progression,
    is_squarefree,
    iter_prime_segments,
    mobius,
    primes_upto,
    sieve_primes,
)


def brute_primes(lo, hi, q=1, a=0):
    out = []
    for n in range(max(lo + 1, 2), hi + 1):
        if q > 1 and n % q != a % q:
            continue
        if all(n % d for d in range(2, int(n**0.5) + 1)):
            out.append(n)
    return out


def test_small_window():
    assert list(sieve_primes(PrimeRange(0, 10))) == [2, 3, 5, 7]


def test_progression_window():
    got = list(sieve_primes(PrimeRange(100, 200, q=3, a=1)))
    assert got == [103, 109, 127, 139, 151, 157, 163, 181, 193, 199]


def test_million_window():
    got = list(sieve_primes(PrimeRange(10**6, 10**6 + 100)))
    assert got == [1000003, 1000033, 1000037, 1000039, 1000081, 1000099]


def test_window_open_below_closed_above():
    # 7 is excluded at the low end, 11 included at the high end
    assert list(sieve_primes(PrimeRange(7, 11))) == [11]


def test_counts_against_pi():
    ps = primes_upto(10**5)
    assert ps.size == 9592
    assert ps[0] == 2 and ps[-1] == 99991


@pytest.mark.parametrize("seed", range(4))
def test_windows_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    lo = int(rng.integers(0, 200000))
    hi = lo + int(rng.integers(1, 3000))
    q = int(rng.integers(1, 12))
    a = int(rng.integers(0, q))
    got = list(sieve_primes(PrimeRange(lo, hi, q=q, a=a)))
    assert got == brute_primes(lo, hi, q, a)


def test_segment_iterator_stitches():
    parts = list(iter_prime_segments(0, 10**5, segment_flats=512))
    assert all(p.size for p in parts)
    flat = np.concatenate(parts)
    assert np.array_equal(flat, primes_upto(10**5))
    assert all(flat[i] < flat[i + 1] for i in range(0, flat.size - 1, 997))


def test_segment_iterator_interior_start():
    flat = np.concatenate(list(iter_prime_segments(10**4, 2 * 10**4, segment_flats=256)))
    assert flat.tolist() == brute_primes(10**4, 2 * 10**4)


def test_range_validation():
    with pytest.raises(ValueError):
        PrimeRange(10, 5)
    with pytest.raises(ValueError):
        PrimeRange(0, 10, q=5, a=7)
    with pytest.raises(ValueError):
        PrimeRange(-1, 5)


def test_factorize():
    assert factorize(1) == []
    assert factorize(2**10) == [(2, 10)]
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(10**6 + 3) == [(1000003, 1)]


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=60, deadline=None)
def test_factorize_reconstructs(n):
    prod = 1
    for p, k in factorize(n):
        prod *= p**k
    assert prod == n


def test_euler_phi():
    assert [euler_phi(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert euler_phi(10**6) == 400000


def test_mobius_and_squarefree():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert is_squarefree(2 * 3 * 5 * 7)
    assert not is_squarefree(12)


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_count_progression_exact(data):
    lo = data.draw(st.integers(min_value=0, max_value=10**9))
    hi = lo + data.draw(st.integers(min_value=0, max_value=10**4))
    q = data.draw(st.integers(min_value=1, max_value=50))
    a = data.draw(st.integers(min_value=0, max_value=q - 1))
    want = sum(1 for n in range(lo + 1, hi + 1) if n % q == a)
    assert count_progression(lo, hi, q, a) == want


def test_first_in_progression():
    # open-below convention: smallest element strictly greater than lo
    assert first_in_progression(100, 15, 10) == 115
    assert first_in_progression(99, 15, 10) == 100
    assert first_in_progression(0, 7, 3) == 3
