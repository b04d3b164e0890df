"""Sieve-theoretic toolkit for primes in arithmetic progressions.

Subpackages and modules cover segmented prime generation, Dirichlet
characters with exact values, a combinatorial lower-bound sieve, almost-prime
weighted sums, zero-ensemble dual bounds, character sum estimates, the bound
pipeline combining them, a certified numerical-constant ledger, and a survey
tool for least primes in progressions.
"""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
