"""Small exact linear algebra over Fraction vectors.

Everything here works on tuples of Fractions; callers convert once at the
boundary.  Elimination is plain fraction-free-enough Gauss-Jordan, which is
fast at the sizes this package ever sees (n <= 12).
"""

from __future__ import annotations

import math
from fractions import Fraction

Vec = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def to_vec(v) -> Vec:
    return tuple(to_fraction(x) for x in v)


def dot(u: Vec, v: Vec) -> Fraction:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(u, v)), ZERO)


def scale(v: Vec, s: Fraction) -> Vec:
    return tuple(x * s for x in v)


def sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def rref(rows: list[Vec]) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = ONE / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def rank(rows: list[Vec]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: list[Vec], ncols: int) -> list[Vec]:
    """Basis of {x : A x = 0} for the matrix with the given rows."""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for c in free:
        x = [ZERO] * ncols
        x[c] = ONE
        for i, p in enumerate(pivots):
            x[p] = -reduced[i][c]
        basis.append(tuple(x))
    return basis


def solve(rows: list[Vec], rhs: Vec) -> Vec | None:
    """Exact solution of A x = b, or None if inconsistent/underdetermined."""
    ncols = len(rows[0]) if rows else 0
    aug = [tuple(r) + (b,) for r, b in zip(rows, rhs)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None
    if len(pivots) < ncols:
        return None
    x = [ZERO] * ncols
    for i, p in enumerate(pivots):
        x[p] = reduced[i][ncols]
    return tuple(x)


def det(rows: list[Vec]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    n = len(rows)
    mat = [list(r) for r in rows]
    if any(len(r) != n for r in mat):
        raise ValueError("determinant requires a square matrix")
    result = ONE
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if mat[i][c] != 0), None)
        if pivot_row is None:
            return ZERO
        if pivot_row != c:
            mat[c], mat[pivot_row] = mat[pivot_row], mat[c]
            result = -result
        result *= mat[c][c]
        inv = ONE / mat[c][c]
        for i in range(c + 1, n):
            if mat[i][c] != 0:
                f = mat[i][c] * inv
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return result


def lcm_denominators(vectors) -> int:
    out = 1
    for v in vectors:
        for x in v:
            out = math.lcm(out, Fraction(x).denominator)
    return out


def sqrt_if_square(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None
