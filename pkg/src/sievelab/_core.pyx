# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: strided composite marking and residue first-hit scans.

Contracts mirror sievelab._pykernels; sievelab.kernels picks whichever is
available at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def mark_strided(cnp.uint8_t[::1] mask, cnp.int64_t[::1] starts, cnp.int64_t[::1] steps):
    """Set mask[s::t] = 1 for each (s, t) pair; out-of-range starts are ignored."""
    cdef Py_ssize_t n = mask.shape[0]
    cdef Py_ssize_t m = starts.shape[0]
    cdef Py_ssize_t j, i
    cdef cnp.int64_t s, t
    for j in range(m):
        s = starts[j]
        t = steps[j]
        if s < 0 or s >= n or t <= 0:
            continue
        i = s
        while i < n:
            mask[i] = 1
            i += t
    return None


def pmin_scan(cnp.int64_t[::1] primes, long long q, cnp.uint8_t[::1] coprime,
              cnp.int64_t[::1] first):
    """First prime per residue class mod q; stops once all coprime classes hit.

    Returns the number of coprime classes filled.
    """
    cdef Py_ssize_t n = primes.shape[0]
    cdef long long need = 0
    cdef long long found = 0
    cdef Py_ssize_t i
    cdef long long r
    for r in range(q):
        if coprime[r]:
            need += 1
            if first[r] >= 0:
                found += 1
    for i in range(n):
        if found >= need:
            break
        r = primes[i] % q
        if first[r] < 0:
            first[r] = primes[i]
            if coprime[r]:
                found += 1
    return found
