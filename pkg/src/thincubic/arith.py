"""Small integer helpers: factorisation, valuations, residue symbols."""
from functools import lru_cache

from sympy import factorint as _factorint
from sympy import isprime, primerange
from sympy.ntheory import sqrt_mod

__all__ = ["factor", "valuation", "legendre", "is_cube_mod", "primes_upto",
           "isprime", "roots_quadratic_mod"]


@lru_cache(maxsize=65536)
def factor(n: int) -> dict:
    """Prime factorisation of |n| as {p: e}.  factor(0) raises."""
    if n == 0:
        raise ValueError("cannot factor 0")
    return dict(_factorint(abs(n)))


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(n: int, p: int) -> int:
    """Legendre symbol for odd prime p."""
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def is_cube_mod(n: int, p: int) -> bool:
    """True if the unit n is a cube mod p."""
    n %= p
    if n == 0:
        return True
    g = 3 if (p - 1) % 3 == 0 else 1
    return pow(n, (p - 1) // g, p) == 1


def primes_upto(n: int) -> list:
    return list(primerange(2, n + 1))


def roots_quadratic_mod(c2: int, c1: int, c0: int, p: int) -> list:
    """Roots in F_p of c2 x^2 + c1 x + c0 (c2 a unit)."""
    c2, c1, c0 = c2 % p, c1 % p, c0 % p
    if p == 2:
        return [x for x in (0, 1) if (c2 * x * x + c1 * x + c0) % 2 == 0]
    disc = (c1 * c1 - 4 * c2 * c0) % p
    inv = pow(2 * c2, -1, p)
    if disc == 0:
        return [(-c1 * inv) % p]
    s = sqrt_mod(disc, p, all_roots=True)
    return sorted({((-c1 + t) * inv) % p for t in s})
