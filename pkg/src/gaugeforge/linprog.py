"""Small dense two-phase simplex with Bland's rule.

Solves min c.x subject to A x = b, x >= 0.  Two interchangeable kingdoms:
exact Fractions with zero tolerance, and numpy doubles.  Bland's rule keeps
the pivot sequence deterministic and cycle-free, which the byte-identical
report requirement relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import FeasibilityError


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list
    value: object
    basis: list[int]

    @property
    def support(self) -> list[int]:
        return [j for j, v in enumerate(self.x) if v > 0]


def solve_lp(c, A, b):
    """Dispatch on scalar kingdom: all-Fraction input runs the exact pivoter."""
    exact = all(isinstance(x, (int, Fraction)) for x in c) and all(
        isinstance(x, (int, Fraction)) for row in A for x in row
    ) and all(isinstance(x, (int, Fraction)) for x in b)
    if exact:
        return solve_lp_exact(c, A, b)
    return solve_lp_float(c, A, b)


# -- float kingdom -----------------------------------------------------------


def _pivot_float(T, basis, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _simplex_float(T, basis, allowed, tol):
    """Bland's rule on the float tableau; objective is the last row."""
    m = T.shape[0] - 1
    while True:
        col = next((j for j in allowed if T[m, j] < -tol), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(m):
            if T[i, col] > tol:
                ratio = T[i, -1] / T[i, col]
                if best is None or ratio < best[0] - tol or (
                    abs(ratio - best[0]) <= tol and basis[i] < basis[best[1]]
                ):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot_float(T, basis, best[1], col)


def solve_lp_float(c, A, b, tol: float = 1e-9) -> LPResult:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b = np.abs(b)

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :] = -T[:m].sum(axis=0)  # phase-1 reduced costs
    basis = list(range(n, n + m))
    structural = list(range(n))

    status = _simplex_float(T, basis, structural, tol)
    scale = 1.0 + float(np.abs(b).sum())
    if status != "optimal" or -T[m, -1] > tol * scale:
        return LPResult("infeasible", [], None, [])

    # drive leftover artificials out of the basis, dropping redundant rows
    active = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in structural if abs(T[i, j]) > tol), None)
            if col is None:
                continue  # redundant constraint row
            _pivot_float(T, basis, i, col)
        active.append(i)

    T2 = np.zeros((len(active) + 1, n + 1))
    T2[: len(active), :n] = T[active][:, :n]
    T2[: len(active), -1] = T[active][:, -1]
    basis2 = [basis[i] for i in active]
    T2[-1, :n] = c
    for i, bj in enumerate(basis2):
        if T2[-1, bj] != 0.0:
            T2[-1] -= T2[-1, bj] * T2[i]

    status = _simplex_float(T2, basis2, structural, tol)
    if status == "unbounded":
        return LPResult("unbounded", [], None, basis2)
    x = [0.0] * n
    for i, bj in enumerate(basis2):
        x[bj] = max(T2[i, -1], 0.0)
    value = float(np.dot(c, x))
    return LPResult("optimal", x, value, basis2)


# -- exact kingdom ------------------------------------------------------------


def _pivot_exact(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for i in range(len(T)):
        if i != row and T[i][col] != 0:
            f = T[i][col]
            T[i] = [a - f * r for a, r in zip(T[i], T[row])]
    basis[row] = col


def _simplex_exact(T, basis, allowed):
    m = len(T) - 1
    while True:
        col = next((j for j in allowed if T[m][j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(m):
            if T[i][col] > 0:
                ratio = T[i][-1] / T[i][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot_exact(T, basis, best[1], col)


def solve_lp_exact(c, A, b) -> LPResult:
    c = [Fraction(x) for x in c]
    A = [[Fraction(x) for x in row] for row in A]
    b = [Fraction(x) for x in b]
    m, n = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-x for x in A[i]]
            b[i] = -b[i]

    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    obj = [Fraction(0)] * (n + m + 1)
    for row in T:
        obj = [o - v for o, v in zip(obj, row)]
    T.append(obj)
    basis = list(range(n, n + m))
    structural = list(range(n))

    status = _simplex_exact(T, basis, structural)
    if status != "optimal" or -T[m][-1] != 0:
        return LPResult("infeasible", [], None, [])

    active = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in structural if T[i][j] != 0), None)
            if col is None:
                continue
            _pivot_exact(T, basis, i, col)
        active.append(i)

    T2 = [[T[i][j] for j in range(n)] + [T[i][-1]] for i in active]
    basis2 = [basis[i] for i in active]
    obj = list(c) + [Fraction(0)]
    for i, bj in enumerate(basis2):
        if obj[bj] != 0:
            f = obj[bj]
            obj = [a - f * r for a, r in zip(obj, T2[i])]
    T2.append(obj)

    status = _simplex_exact(T2, basis2, structural)
    if status == "unbounded":
        return LPResult("unbounded", [], None, basis2)
    x = [Fraction(0)] * n
    for i, bj in enumerate(basis2):
        x[bj] = T2[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", x, value, basis2)


def require_optimal(result: LPResult, context: str) -> LPResult:
    if result.status == "infeasible":
        raise FeasibilityError(f"{context}: constraint system infeasible (sample too sparse)")
    if result.status != "optimal":
        raise FeasibilityError(f"{context}: linear program {result.status}")
    return result
