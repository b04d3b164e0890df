from .primes import (
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
from .characters import (
    CharacterGroup,
    CharValue,
    DirichletCharacter,
    UnitGroupStructure,
    character_eval,
    character_group,
    real_value_tables,
    unit_structure,
    verify_orthogonality,
)

__all__ = [
    "PrimeRange",
    "count_progression",
    "euler_phi",
    "factorize",
    "first_in_progression",
    "is_squarefree",
    "iter_prime_segments",
    "mobius",
    "primes_upto",
    "sieve_primes",
    "CharacterGroup",
    "CharValue",
    "DirichletCharacter",
    "UnitGroupStructure",
    "character_eval",
    "character_group",
    "real_value_tables",
    "unit_structure",
    "verify_orthogonality",
]
