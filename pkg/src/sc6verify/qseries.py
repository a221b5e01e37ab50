"""Exact integer power series truncated at a fixed precision.

Coefficients live in numpy object arrays so every entry is a Python int;
intermediate eta-product expansions reach partition-number sizes long before
the final quotients settle down to small values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "IntSeries",
    "apply_eta_factor",
    "eta_product",
    "EtaQuotient",
    "sc6_series",
    "c3_series",
    "IdentityCheck",
    "verify_eta_identities",
    "SC6_FACTORS",
    "C3_FACTORS",
]

# sum sc6(n) q^n = prod (1-q^2k)^2 (1-q^12k)^3 / ((1-q^k)(1-q^4k))
SC6_FACTORS = ((2, 2), (12, 3), (1, -1), (4, -1))
# sum c3(n) q^n = prod (1-q^3k)^3 / (1-q^k)
C3_FACTORS = ((3, 3), (1, -1))


class IntSeries:
    __slots__ = ("_c",)

    def __init__(self, coefficients: Iterable[int], precision: int | None = None):
        coeffs = [int(c) for c in coefficients]
        if precision is None:
            precision = len(coeffs)
        if precision < 1:
            raise ValueError("precision must be positive")
        coeffs = coeffs[:precision] + [0] * max(0, precision - len(coeffs))
        arr = np.empty(precision, dtype=object)
        arr[:] = coeffs
        self._c = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "IntSeries":
        obj = cls.__new__(cls)
        obj._c = arr
        return obj

    @classmethod
    def one(cls, precision: int) -> "IntSeries":
        return cls([1], precision)

    @property
    def precision(self) -> int:
        return len(self._c)

    @property
    def coefficients(self) -> list[int]:
        return list(self._c)

    def __len__(self):
        return len(self._c)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return list(self._c[n])
        return self._c[n]

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other):
        if not isinstance(other, IntSeries):
            return NotImplemented
        return self.precision == other.precision and bool(np.all(self._c == other._c))

    def __repr__(self):
        head = " + ".join(f"{c}q^{i}" for i, c in enumerate(self._c[:8]) if c)
        return f"IntSeries({head or '0'} + O(q^{self.precision}))"

    def truncate(self, precision: int) -> "IntSeries":
        return IntSeries(self._c[:precision], precision)

    def __add__(self, other: "IntSeries") -> "IntSeries":
        p = min(self.precision, other.precision)
        return IntSeries._wrap(self._c[:p] + other._c[:p])

    def __sub__(self, other: "IntSeries") -> "IntSeries":
        p = min(self.precision, other.precision)
        return IntSeries._wrap(self._c[:p] - other._c[:p])

    def __neg__(self) -> "IntSeries":
        return IntSeries._wrap(-self._c)

    def scale(self, k: int) -> "IntSeries":
        return IntSeries._wrap(self._c * int(k))

    def __mul__(self, other: "IntSeries") -> "IntSeries":
        # schoolbook over the nonzero entries of the sparser operand
        p = min(self.precision, other.precision)
        a, b = self._c[:p], other._c[:p]
        if np.count_nonzero(a) > np.count_nonzero(b):
            a, b = b, a
        out = np.zeros(p, dtype=object)
        for i in np.flatnonzero(a):
            out[i:] += a[i] * b[: p - i]
        return IntSeries._wrap(out)

    def mul_one_minus(self, m: int, times: int = 1) -> "IntSeries":
        """Multiply by (1 - q^m)^times for times >= 0, or divide when negative."""
        if m < 1:
            raise ValueError("shift must be positive")
        c = self._c.copy()
        _apply_binomial(c, m, times)
        return IntSeries._wrap(c)


def _apply_binomial(c: np.ndarray, m: int, e: int) -> None:
    """In-place c *= (1 - q^m)^e, truncated to len(c)."""
    p = len(c)
    if m >= p or e == 0:
        return
    if e > 0:
        for _ in range(e):
            c[m:] = c[m:] - c[:-m]
        return
    # 1/(1-q^m) = sum q^{jm}: a running sum along each residue class mod m
    pad = (-p) % m
    for _ in range(-e):
        block = np.concatenate([c, np.zeros(pad, dtype=object)]).reshape(-1, m)
        c[:] = np.cumsum(block, axis=0).reshape(-1)[:p]


def apply_eta_factor(s: IntSeries, a: int, e: int) -> IntSeries:
    """Return s * prod_{k>=1} (1 - q^{ak})^e truncated to s.precision."""
    if a < 1:
        raise ValueError("eta factor scale must be positive")
    c = s._c.copy()
    for k in range(1, (s.precision - 1) // a + 1):
        _apply_binomial(c, a * k, e)
    return IntSeries._wrap(c)


def eta_product(factors: Sequence[tuple[int, int]], precision: int) -> IntSeries:
    """prod over (a, e) of prod_k (1 - q^{ak})^e, factors interleaved by k.

    Processing every factor at the same k before moving on keeps the
    intermediate coefficients far smaller than applying each full product
    in turn.
    """
    for a, _ in factors:
        if a < 1:
            raise ValueError("eta factor scale must be positive")
    c = IntSeries.one(precision)._c
    for k in range(1, precision):
        for a, e in factors:
            if a * k < precision:
                _apply_binomial(c, a * k, e)
    return IntSeries._wrap(c)


def sc6_series(precision: int) -> IntSeries:
    """Coefficient n is the number of self-conjugate 6-core partitions of n."""
    if precision < 1:
        raise ValueError("precision must be positive")
    return eta_product(SC6_FACTORS, precision)


def c3_series(precision: int) -> IntSeries:
    """Coefficient n is the number of 3-core partitions of n."""
    if precision < 1:
        raise ValueError("precision must be positive")
    return eta_product(C3_FACTORS, precision)


@dataclass(frozen=True)
class EtaQuotient:
    """prod eta(a z)^e, with the q^{sum a e / 24} prefactor kept apart.

    The product part only involves powers q^{g k} where g is the gcd of the
    scales, so it is expanded in the variable q^g and mapped back to true
    exponents by ``offset + g * index``.
    """

    factors: tuple[tuple[int, int], ...]

    @property
    def prefactor(self) -> Fraction:
        return Fraction(sum(a * e for a, e in self.factors), 24)

    @property
    def stride(self) -> int:
        return math.gcd(*(a for a, _ in self.factors))

    def offset(self) -> int:
        pre = self.prefactor
        if pre.denominator != 1 or pre < 0:
            raise ValueError(f"eta quotient prefactor {pre} is not a nonnegative integer")
        return int(pre)

    def expand(self, precision: int) -> dict[int, int]:
        """Nonzero coefficients at true exponents < precision."""
        off, g = self.offset(), self.stride
        if precision <= off:
            return {}
        inner = (precision - off - 1) // g + 1
        reduced = tuple((a // g, e) for a, e in self.factors)
        series = eta_product(reduced, inner)
        return {off + g * j: int(c) for j, c in enumerate(series) if c}


@dataclass
class IdentityCheck:
    name: str
    precision: int
    passed: bool
    terms_compared: int
    first_failure: tuple[int, int, int] | None = None  # (exponent, lhs, rhs)
    details: dict = field(default_factory=dict)


def _compare(name, precision, lhs: dict[int, int], rhs: dict[int, int]) -> IdentityCheck:
    keys = sorted(set(lhs) | set(rhs))
    for k in keys:
        if lhs.get(k, 0) != rhs.get(k, 0):
            return IdentityCheck(name, precision, False, len(keys), (k, lhs.get(k, 0), rhs.get(k, 0)))
    return IdentityCheck(name, precision, True, len(keys))


def _odd_square_series(precision: int) -> dict[int, int]:
    # sum_{n>=0} q^{3(2n+1)^2}
    out: dict[int, int] = {}
    n = 0
    while 3 * (2 * n + 1) ** 2 < precision:
        e = 3 * (2 * n + 1) ** 2
        out[e] = out.get(e, 0) + 1
        n += 1
    return out


def _three_core_side(precision: int) -> dict[int, int]:
    # sum_n c3(n) q^{32(3n+1)}, with c3(n) = #{x^2+xy+y^2 = 3n+1} / 6
    from .binaryqf import loeschian_table

    top = (precision - 1) // 32  # largest admissible 3n+1
    if top < 1:
        return {}
    n_top = (top - 1) // 3
    table = loeschian_table(3 * n_top + 1)
    out = {}
    for n in range(n_top + 1):
        count = int(table[3 * n + 1])
        if count % 6:
            raise ArithmeticError(f"Loeschian count {count} of {3 * n + 1} not divisible by 6")
        if count:
            out[32 * (3 * n + 1)] = count // 6
    return out


def verify_eta_identities(precision: int) -> list[IdentityCheck]:
    """Check both eta-quotient identities on all exponents below ``precision``.

    eta(48z)^2/eta(24z)   = sum_{n>=0} q^{3(2n+1)^2}
    eta(288z)^3/eta(96z)  = sum_{n>=0} c3(n) q^{32(3n+1)}

    The right side of the second identity takes c3(n) from the Loeschian
    count, so neither right side shares code with the eta expansion.
    """
    if precision < 1:
        raise ValueError("precision must be positive")
    first = EtaQuotient(((48, 2), (24, -1)))
    second = EtaQuotient(((288, 3), (96, -1)))
    checks = [
        _compare("eta(48z)^2/eta(24z)", precision, first.expand(precision), _odd_square_series(precision)),
        _compare("eta(288z)^3/eta(96z)", precision, second.expand(precision), _three_core_side(precision)),
    ]
    checks[0].details["prefactor"] = int(first.prefactor)
    checks[1].details["prefactor"] = int(second.prefactor)
    return checks

