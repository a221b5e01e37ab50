"""Integer primitives: Kronecker symbol, factorization, square-freeness, isqrt."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Factorization",
    "kronecker",
    "factorize",
    "is_squarefree",
    "isqrt",
    "is_prime",
    "primes_up_to",
    "divisors",
]

# Deterministic for all n < 3.3e24, which covers the 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1 or not is_prime(p):
                raise ValueError(f"malformed factorization of {self.value}: {self.factors}")
            prod *= p**e
            last = p
        if prod != self.value:
            raise ValueError(f"factors of {self.value} multiply to {prod}")

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __iter__(self):
        return iter(self.factors)


def isqrt(n: int) -> int:
    """Floor of the square root of a nonnegative integer."""
    if n < 0:
        raise ValueError("isqrt of negative number")
    return math.isqrt(n)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> Factorization:
    """Trial division by 2, 3 and then the 6k +/- 1 wheel.

    >>> factorize(29400).factors
    ((2, 3), (3, 1), (5, 2), (7, 2))
    """
    if n < 1 or n > _INT64_MAX:
        raise ValueError(f"factorize needs 1 <= n < 2**63, got {n}")
    m = n
    out = []
    for p in (2, 3):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            out.append((p, e))
    p, step = 5, 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    # strip powers of two from n
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit via an Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)
