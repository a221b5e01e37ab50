"""Genus decomposition of theta_Q and the weight-2 newform of level 24.

theta_Q = E + C with E = (theta_Q + 3 theta_Q')/4 and C = 3 (theta_Q - theta_Q')/4.
Everything is stored scaled by 4 so the arrays stay integral.

The newform coefficients A(n) come from point counts on y^2 = x^3 - x^2 + x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import divisors, factorize, is_prime, is_squarefree, kronecker, primes_up_to
from .binaryqf import class_number
from .ternary import Q_MAIN, Q_MATE, rep_count, theta_array

__all__ = [
    "GenusDecomposition",
    "Report",
    "decompose",
    "eisenstein_class_check",
    "eigenform_ap",
    "eigenform_an",
    "eigenform_coefficients",
    "shimura_lift_check",
    "shimura_coefficient",
    "hecke_relation_check",
    "hasse_small_prime_check",
    "BAD_PRIME_AP",
]

# A(2) and A(3) read off q - q^3 - 2q^5 + ...; both primes divide the level exactly.
BAD_PRIME_AP = {2: 0, 3: -1}
CURVE = (-1, 1, 0)  # y^2 = x^3 + a x^2 + b x + c


@dataclass
class Report:
    """Outcome of a verification: passed, plus whatever failed and context."""

    name: str
    passed: bool
    checked: int = 0
    failures: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f"; first failures: {self.failures[:3]}" if self.failures else ""
        return f"[{status}] {self.name}: {self.checked} cases{tail}"


@dataclass(frozen=True)
class GenusDecomposition:
    bound: int
    r_main: np.ndarray
    r_mate: np.ndarray

    @property
    def e4(self) -> np.ndarray:
        return self.r_main + 3 * self.r_mate

    @property
    def c4(self) -> np.ndarray:
        return 3 * (self.r_main - self.r_mate)

    def a_E(self, n: int) -> Fraction:
        return Fraction(int(self.e4[n]), 4)

    def a_C(self, n: int) -> Fraction:
        return Fraction(int(self.c4[n]), 4)


@lru_cache(maxsize=8)
def decompose(bound: int) -> GenusDecomposition:
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    r_main = theta_array(Q_MAIN, bound)
    r_mate = theta_array(Q_MATE, bound)
    r_main.setflags(write=False)
    r_mate.setflags(write=False)
    return GenusDecomposition(bound, r_main, r_mate)


def _family(n_max: int) -> list[int]:
    return [24 * n + 35 for n in range(n_max + 1) if is_squarefree(24 * n + 35)]


def eisenstein_class_check(n_max: int) -> Report:
    """4 a_E(N) = 12 h(-N) for squarefree N = 24n + 35, n <= n_max."""
    Ns = _family(n_max)
    dec = decompose(24 * n_max + 35)
    failures = []
    for N in Ns:
        lhs, rhs = int(dec.e4[N]), 12 * class_number(-N)
        if lhs != rhs:
            failures.append((N, lhs, rhs))
    return Report("eisenstein a_E(N) = 3 h(-N)", not failures, len(Ns), failures)


# --- the newform ----------------------------------------------------------


def eigenform_ap(p: int) -> int:
    """Trace of Frobenius of y^2 = x^3 - x^2 + x at p (= A(p) for p >= 5)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p in BAD_PRIME_AP:
        return BAD_PRIME_AP[p]
    a, b, c = CURVE
    x = np.arange(p, dtype=np.int64)
    x2 = x * x % p
    fx = ((x2 + a * x + b) * x + c) % p
    is_square = np.zeros(p, dtype=bool)
    is_square[x2] = True
    # #E(F_p) = p + 1 + sum_x (f(x) | p), so A(p) = -sum_x (f(x) | p)
    residues = int(np.count_nonzero(is_square[fx]))
    zeros = int(np.count_nonzero(fx == 0))
    # is_square[0] is set, so the zero roots were counted as residues
    return -((residues - zeros) - (p - residues))


@lru_cache(maxsize=None)
def _ap_cached(p: int) -> int:
    return eigenform_ap(p)


def _a_prime_power(p: int, k: int) -> int:
    ap = _ap_cached(p)
    if p in BAD_PRIME_AP:
        return ap**k
    prev, cur = 1, ap
    for _ in range(k - 1):
        prev, cur = cur, ap * cur - p * prev
    return cur if k else 1


def eigenform_an(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    out = 1
    for p, k in factorize(n):
        out *= _a_prime_power(p, k)
    return out


def eigenform_coefficients(limit: int) -> np.ndarray:
    """int64 array with A(n) at index n for 1 <= n <= limit (index 0 is 0).

    A(p) per prime by point counting, then extended multiplicatively with a
    smallest-prime-factor sieve.
    """
    A = np.zeros(limit + 1, dtype=np.int64)
    if limit < 1:
        return A
    A[1] = 1
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit).tolist():
        mask = spf[p::p] == 0
        spf[p::p][mask] = p
    for n in range(2, limit + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        A[n] = _a_prime_power(p, k) * A[m]
    return A


# --- Shimura lift, Hecke relation, Hasse bound ---------------------------


def shimura_coefficient(n: int, dec: GenusDecomposition, t: int = 3) -> Fraction:
    """b(n) = sum_{d | n, (d, 96) = 1} (-t | d) a_C(t n^2 / d^2)  (weight 3/2, so d^0)."""
    total = 0
    for d in divisors(n):
        if d % 2 == 0 or d % 3 == 0:
            continue
        total += kronecker(-t, d) * int(dec.c4[t * (n // d) ** 2])
    return Fraction(total, 4)


def shimura_lift_check(n_max: int) -> Report:
    """b(n) = (3/2) A(n) for n <= n_max, the constant fixed from n = 1."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    dec = decompose(3 * n_max * n_max)
    const = shimura_coefficient(1, dec) / eigenform_an(1)
    failures = []
    for n in range(1, n_max + 1):
        b = shimura_coefficient(n, dec)
        if b != const * eigenform_an(n):
            failures.append((n, b, eigenform_an(n)))
    return Report("shimura lift b(n) = c A(n)", not failures, n_max, failures, {"constant": const})


def hecke_relation_check(N: int, p: int) -> Report:
    """r_Q(Np^2) - r_Q'(Np^2) = (A(p) - (-N|p)) (r_Q(N) - r_Q'(N)) for squarefree N."""
    if N < 1 or not is_squarefree(N):
        raise ValueError(f"N = {N} must be squarefree")
    if not is_prime(p) or p < 5 or (6 * N) % p == 0:
        raise ValueError(f"p = {p} must be a prime >= 5 not dividing 6N")
    M = N * p * p
    lhs = rep_count(Q_MAIN, M) - rep_count(Q_MATE, M)
    rhs = (eigenform_ap(p) - kronecker(-N, p)) * (rep_count(Q_MAIN, N) - rep_count(Q_MATE, N))
    failures = [] if lhs == rhs else [(N, p, lhs, rhs)]
    return Report(f"hecke relation N={N} p={p}", lhs == rhs, 1, failures, {"lhs": lhs, "rhs": rhs})


def hasse_small_prime_check(p_max: int) -> Report:
    """A(p)^2 <= 4p for 5 <= p <= p_max, and 2A(p) < p - 1 for 5 <= p <= 17."""
    if p_max < 17:
        raise ValueError("p_max must be at least 17")
    failures = []
    primes = [p for p in primes_up_to(p_max).tolist() if p >= 5]
    for p in primes:
        ap = _ap_cached(p)
        if ap * ap > 4 * p:
            failures.append(("hasse", p, ap))
        if p <= 17 and 2 * ap >= p - 1:
            failures.append(("small prime", p, ap))
    return Report("hasse bound and small primes", not failures, len(primes), failures)
