"""Positive definite binary quadratic forms: class numbers and Loeschian counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import isqrt

__all__ = [
    "BinaryForm",
    "BinaryFormClassData",
    "class_data",
    "class_number",
    "unit_weight",
    "loeschian_count",
    "loeschian_table",
    "LOESCHIAN_TABLE_GUARD",
]

LOESCHIAN_TABLE_GUARD = 10**9 // 32


@dataclass(frozen=True, order=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.discriminant < 0

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y


@dataclass(frozen=True)
class BinaryFormClassData:
    discriminant: int
    forms: tuple[BinaryForm, ...]
    w: int

    @property
    def h(self) -> int:
        return len(self.forms)


def unit_weight(D: int) -> int:
    """Number of units of the order of discriminant D (6, 4 or 2)."""
    return {-3: 6, -4: 4}.get(D, 2)


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")


@lru_cache(maxsize=4096)
def class_data(D: int) -> BinaryFormClassData:
    """Reduced primitive forms of discriminant D < 0.

    Reduced forms satisfy 3a^2 <= |D|, so a runs up to sqrt(|D|/3) and b over
    the residues b = D (mod 2) in [-a, a].
    """
    _check_discriminant(D)
    forms = []
    a_max = isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1 if (-a - D) % 2 else -a, a + 1, 2):
            num = b * b - D
            if num % (4 * a):
                continue
            f = BinaryForm(a, b, num // (4 * a))
            if f.is_reduced() and f.is_primitive():
                forms.append(f)
    return BinaryFormClassData(D, tuple(forms), unit_weight(D))


def class_number(D: int) -> int:
    return class_data(D).h


def loeschian_count(m: int) -> int:
    """#{(y, z) in Z^2 : y^2 + yz + z^2 = m}.

    With u = 2y + z the equation reads u^2 + 3z^2 = 4m, so |z| <= sqrt(4m/3).
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return 1
    count = 0
    z_max = isqrt(4 * m // 3)
    for z in range(-z_max, z_max + 1):
        rest = 4 * m - 3 * z * z
        u = isqrt(rest)
        if u * u != rest:
            continue
        for uu in {u, -u}:
            if (uu - z) % 2 == 0:
                count += 1
    return count


def loeschian_table(bound: int) -> np.ndarray:
    """uint32 array whose entry m is loeschian_count(m) for every m <= bound."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if bound > LOESCHIAN_TABLE_GUARD:
        raise MemoryError(f"Loeschian table bound {bound} exceeds guard {LOESCHIAN_TABLE_GUARD}")
    z_max = isqrt(4 * bound // 3)
    chunks = []
    for z in range(-z_max, z_max + 1):
        # y^2 + yz + z^2 <= bound  <=>  (2y + z)^2 <= 4 bound - 3 z^2
        r = isqrt(4 * bound - 3 * z * z)
        y = np.arange((-r - z + 1) // 2, (r - z) // 2 + 1, dtype=np.int64)
        vals = y * y + y * z + z * z
        chunks.append(vals[vals <= bound])
    return np.bincount(np.concatenate(chunks), minlength=bound + 1).astype(np.uint32)
