"""Small exact linear algebra over ``Fraction`` (matrices are lists of rows)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def to_fraction_matrix(rows: Sequence[Sequence[int | Fraction]]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def _echelon(m: list[list[Fraction]]) -> tuple[list[list[Fraction]], int, int]:
    """Row-reduce a copy of ``m``. Returns (reduced, rank, sign of row swaps)."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    sign = 1
    for c in range(cols):
        pivot = next((i for i in range(rank, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[rank], a[pivot] = a[pivot], a[rank]
            sign = -sign
        for i in range(rank + 1, rows):
            if a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return a, rank, sign


def rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    if not rows:
        return 0
    return _echelon(to_fraction_matrix(rows))[1]


def det(rows: Sequence[Sequence[int | Fraction]]) -> Fraction:
    m = to_fraction_matrix(rows)
    n = len(m)
    a, r, sign = _echelon(m)
    if r < n:
        return Fraction(0)
    out = Fraction(sign)
    for i in range(n):
        out *= a[i][i]
    return out


def inverse(rows: Sequence[Sequence[int | Fraction]]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse; raises ``ZeroDivisionError`` on singular input."""
    m = to_fraction_matrix(rows)
    n = len(m)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def matvec(m: Sequence[Sequence[Fraction]], v: Sequence[int | Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in m)


def transpose(m: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    return [list(col) for col in zip(*m)]


def dot(a: Sequence[int | Fraction], b: Sequence[int | Fraction]):
    return sum(x * y for x, y in zip(a, b))


def primitive_scale(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Positive rescaling of a rational vector to coprime integer entries."""
    den = lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * den) for x in v]
    g = gcd(*ints)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x // g) for x in ints)
