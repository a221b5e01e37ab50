"""Positive definite integral ternary quadratic forms.

Forms are stored by their Gram matrix A (even diagonal), Q(v) = v^T A v / 2.
Lattice enumeration eliminates the first coordinate by completing the
square: for fixed (x2, x3),

    Q = a x1^2 + L x1 + R,   a = A11/2,  L = A12 x2 + A13 x3,

and the remaining binary form g(x2, x3) = 4 a R - L^2 bounds the outer
loops. All bounds are exact integers; no floating point decides a count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction

import numpy as np

from .arith import isqrt
from .binaryqf import LOESCHIAN_TABLE_GUARD
from .qseries import IntSeries

__all__ = [
    "TernaryForm",
    "GenusPair",
    "AutomorphGroup",
    "Q_MAIN",
    "Q_MATE",
    "GENUS",
    "evaluate",
    "rep_count",
    "representations",
    "theta_series",
    "theta_array",
    "rq_fast",
    "rq_fast_residues",
    "automorph_group",
    "primitive_rep_count",
    "genus_G",
]

THETA_GUARD = LOESCHIAN_TABLE_GUARD
_BATCH = 4_000_000


def _isqrt_array(d: np.ndarray) -> np.ndarray:
    """Exact floor square roots of a nonnegative int64 array."""
    s = np.floor(np.sqrt(d.astype(np.float64))).astype(np.int64)
    s -= (s * s > d).astype(np.int64)
    s += ((s + 1) * (s + 1) <= d).astype(np.int64)
    return s


def _det(A) -> int:
    return (
        A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
        - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
        + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])
    )


@dataclass(frozen=True)
class TernaryForm:
    gram: tuple[tuple[int, int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", A)
        if len(A) != 3 or any(len(r) != 3 for r in A):
            raise ValueError("Gram matrix must be 3x3")
        if any(A[i][j] != A[j][i] for i in range(3) for j in range(3)):
            raise ValueError("Gram matrix must be symmetric")
        if any(A[i][i] % 2 for i in range(3)):
            raise ValueError("Gram matrix must have even diagonal")
        m1 = A[0][0]
        m2 = A[0][0] * A[1][1] - A[0][1] ** 2
        if m1 <= 0 or m2 <= 0 or self.det <= 0:
            raise ValueError("form is not positive definite")

    @classmethod
    def from_coefficients(cls, a, b, c, d, e, f, name=""):
        """a x^2 + b y^2 + c z^2 + d yz + e xz + f xy."""
        return cls(((2 * a, f, e), (f, 2 * b, d), (e, d, 2 * c)), name)

    @property
    def det(self) -> int:
        return _det(self.gram)

    def __call__(self, v) -> int:
        return evaluate(self, v)

    @cached_property
    def _elim(self):
        # g(x2, x3) = alpha x2^2 + beta x2 x3 + gamma x3^2 = 4 a R - L^2
        A = self.gram
        a = A[0][0] // 2
        alpha = 4 * a * (A[1][1] // 2) - A[0][1] ** 2
        beta = 4 * a * A[1][2] - 2 * A[0][1] * A[0][2]
        gamma = 4 * a * (A[2][2] // 2) - A[0][2] ** 2
        return a, alpha, beta, gamma

    def x3_bound(self, n: int) -> int:
        a, alpha, beta, gamma = self._elim
        # g <= 4 a n and min over x2 of g is (4 alpha gamma - beta^2) x3^2 / (4 alpha)
        return isqrt(16 * a * alpha * n // (4 * alpha * gamma - beta * beta))

    def _x2_range(self, n: int, x3: int) -> tuple[int, int]:
        a, alpha, beta, gamma = self._elim
        disc = beta * beta * x3 * x3 - 4 * alpha * (gamma * x3 * x3 - 4 * a * n)
        if disc < 0:
            return 0, -1
        s = isqrt(disc) + 1
        lo = -((beta * x3 + s) // (2 * alpha)) - 1
        hi = (-beta * x3 + s) // (2 * alpha) + 1
        return lo, hi


def evaluate(f: TernaryForm, v) -> int:
    A = f.gram
    x = [int(t) for t in v]
    total = sum(A[i][j] * x[i] * x[j] for i in range(3) for j in range(3))
    return total // 2


def _slabs(f: TernaryForm, n: int):
    """Yield (x3, x2 array, L array, R array) covering every (x2, x3) with min_x1 Q <= n."""
    A = f.gram
    for x3 in range(-f.x3_bound(n), f.x3_bound(n) + 1):
        lo, hi = f._x2_range(n, x3)
        if hi < lo:
            continue
        x2 = np.arange(lo, hi + 1, dtype=np.int64)
        L = A[0][1] * x2 + A[0][2] * x3
        R = (A[1][1] // 2) * x2 * x2 + A[1][2] * x2 * x3 + (A[2][2] // 2) * x3 * x3
        yield x3, x2, L, R


def representations(f: TernaryForm, n: int) -> list[tuple[int, int, int]]:
    """All integer vectors v with Q(v) = n, sorted lexicographically."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = f.gram[0][0] // 2
    out = []
    for x3, x2, L, R in _slabs(f, n):
        disc = L * L - 4 * a * (R - n)
        ok = disc >= 0
        x2, L, disc = x2[ok], L[ok], disc[ok]
        s = _isqrt_array(disc)
        sq = s * s == disc
        for y, l, r in zip(x2[sq].tolist(), L[sq].tolist(), s[sq].tolist()):
            for root in {r, -r}:
                num = -l + root
                if num % (2 * a) == 0:
                    out.append((num // (2 * a), y, x3))
    out.sort()
    return out


def rep_count(f: TernaryForm, n: int) -> int:
    """r_f(n) by lattice enumeration."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = f.gram[0][0] // 2
    total = 0
    for _, _, L, R in _slabs(f, n):
        disc = L * L - 4 * a * (R - n)
        ok = disc >= 0
        L, disc = L[ok], disc[ok]
        s = _isqrt_array(disc)
        sq = s * s == disc
        L, s = L[sq], s[sq]
        plus = (-L + s) % (2 * a) == 0
        minus = ((-L - s) % (2 * a) == 0) & (s != 0)
        total += int(plus.sum() + minus.sum())
    return total


def theta_array(f: TernaryForm, bound: int) -> np.ndarray:
    """int64 array of r_f(n) for 0 <= n <= bound, one pass over the lattice points."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if bound > THETA_GUARD:
        raise MemoryError(f"theta bound {bound} exceeds guard {THETA_GUARD}")
    a = f.gram[0][0] // 2
    counts = np.zeros(bound + 1, dtype=np.int64)
    pending: list[np.ndarray] = []
    pending_size = 0
    for _, _, L, R in _slabs(f, bound):
        disc = L * L - 4 * a * (R - bound)
        ok = disc >= 0
        L, R, disc = L[ok], R[ok], disc[ok]
        s = _isqrt_array(disc)
        # x1 in [ceil((-L - s) / 2a), floor((-L + s) / 2a)]
        lo = -((L + s) // (2 * a))
        hi = (-L + s) // (2 * a)
        lengths = np.maximum(hi - lo + 1, 0)
        if not lengths.sum():
            continue
        starts = np.repeat(lo, lengths)
        offs = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        x1 = starts + offs
        vals = a * x1 * x1 + np.repeat(L, lengths) * x1 + np.repeat(R, lengths)
        vals = vals[vals <= bound]
        pending.append(vals)
        pending_size += len(vals)
        if pending_size > _BATCH:
            counts += np.bincount(np.concatenate(pending), minlength=bound + 1)
            pending, pending_size = [], 0
    if pending:
        counts += np.bincount(np.concatenate(pending), minlength=bound + 1)
    return counts


def theta_series(f: TernaryForm, bound: int) -> IntSeries:
    return IntSeries(theta_array(f, bound).tolist(), bound + 1)


def rq_fast_residues(N: int) -> list[int]:
    """Residues x mod 16 with 3 x^2 = N (mod 32)."""
    return [r for r in range(16) if (N - 3 * r * r) % 32 == 0]


def rq_fast(N: int, table: np.ndarray) -> int:
    """r_Q(N) for Q = 3x^2 + 32(y^2 + yz + z^2) through a Loeschian table."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if len(table) <= N // 32:
        raise ValueError(f"Loeschian table of length {len(table)} too small for N = {N}")
    x_max = isqrt(N // 3)
    total = 0
    for r in rq_fast_residues(N):
        start = r - 16 * ((r + x_max) // 16)
        xs = np.arange(start, x_max + 1, 16, dtype=np.int64)
        total += int(table[(N - 3 * xs * xs) // 32].sum(dtype=np.int64))
    return total


# --- automorphs and orbits ------------------------------------------------


@dataclass(frozen=True)
class AutomorphGroup:
    form: TernaryForm
    matrices: tuple[tuple[tuple[int, ...], ...], ...]

    def __len__(self):
        return len(self.matrices)

    def __contains__(self, B):
        return _as_key(B) in set(self.matrices)

    def arrays(self) -> list[np.ndarray]:
        return [np.array(B, dtype=np.int64) for B in self.matrices]


def _as_key(B) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in np.asarray(B))


def _det3(B) -> int:
    return _det([[int(x) for x in row] for row in B])


def automorph_group(f: TernaryForm, proper: bool = True) -> AutomorphGroup:
    """All integral B with B^T A B = A (and det B = +1 when proper)."""
    A = np.array(f.gram, dtype=np.int64)
    cols = [representations(f, int(A[i, i]) // 2) for i in range(3)]
    cols = [np.array(c, dtype=np.int64) for c in cols]
    found = []
    for u in cols[0]:
        for v in cols[1]:
            if u @ A @ v != A[0, 1]:
                continue
            for w in cols[2]:
                if u @ A @ w != A[0, 2] or v @ A @ w != A[1, 2]:
                    continue
                B = np.column_stack([u, v, w])
                d = _det3(B)
                if proper and d != 1:
                    continue
                found.append(B)
    for B in found:
        assert (B.T @ A @ B == A).all()
        assert abs(_det3(B)) == 1
    return AutomorphGroup(f, tuple(sorted(_as_key(B) for B in found)))


def primitive_representations(f: TernaryForm, n: int) -> list[tuple[int, int, int]]:
    return [v for v in representations(f, n) if math.gcd(*v) == 1]


def primitive_rep_count(f: TernaryForm, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return len(primitive_representations(f, n))


def orbit_count(group: AutomorphGroup, vectors) -> int:
    """Number of orbits of the group acting on a set of vectors (v -> B v)."""
    mats = group.arrays()
    remaining = sorted(tuple(v) for v in vectors)
    seen: set[tuple[int, int, int]] = set()
    orbits = 0
    for v in remaining:
        if v in seen:
            continue
        orbits += 1
        vv = np.array(v, dtype=np.int64)
        for B in mats:
            seen.add(tuple(int(t) for t in B @ vv))
    return orbits


@dataclass(frozen=True)
class GenusPair:
    main: TernaryForm
    mate: TernaryForm

    def __post_init__(self):
        if self.main.det != self.mate.det:
            raise ValueError("genus members must share the determinant")

    @cached_property
    def groups(self) -> tuple[AutomorphGroup, AutomorphGroup]:
        return automorph_group(self.main), automorph_group(self.mate)


# Q = 3x^2 + 32y^2 + 32yz + 32z^2 and its genus mate
# Q' = 11x^2 + 10xy + 11y^2 + 6xz - 6yz + 27z^2
Q_MAIN = TernaryForm(((6, 0, 0), (0, 64, 32), (0, 32, 64)), "Q")
Q_MATE = TernaryForm(((22, 10, 6), (10, 22, -6), (6, -6, 54)), "Q'")
GENUS = GenusPair(Q_MAIN, Q_MATE)


def genus_G(pair: GenusPair, n: int, method: str = "formula"):
    """Essentially distinct primitive representations of n by the genus.

    ``formula`` weights the primitive counts by the inverse automorph group
    orders; ``orbit`` counts the orbits explicitly.
    """
    if n < 1:
        raise ValueError("n must be positive")
    g_main, g_mate = pair.groups
    if method == "formula":
        return Fraction(primitive_rep_count(pair.main, n), len(g_main)) + Fraction(
            primitive_rep_count(pair.mate, n), len(g_mate)
        )
    if method == "orbit":
        return orbit_count(g_main, primitive_representations(pair.main, n)) + orbit_count(
            g_mate, primitive_representations(pair.mate, n)
        )
    raise ValueError(f"unknown method {method!r}")
