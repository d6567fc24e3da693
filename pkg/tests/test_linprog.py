"""Simplex solver against closed forms and the scipy oracle."""

from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog as scipy_linprog

from gaugeforge.linprog import solve_lp, solve_lp_exact, solve_lp_float


def test_exact_simple_instance():
    # min x0 + x1 s.t. x0 + 2 x1 = 4, x >= 0  ->  x = (0, 2)
    res = solve_lp_exact([1, 1], [[1, 2]], [4])
    assert res.status == "optimal"
    assert res.value == 2
    assert res.x == [Fraction(0), Fraction(2)]


def test_exact_infeasible():
    res = solve_lp_exact([1], [[1], [1]], [1, 2])
    assert res.status == "infeasible"


def test_exact_unbounded():
    # min -x0 s.t. x0 - x1 = 0
    res = solve_lp_exact([-1, 0], [[1, -1]], [0])
    assert res.status == "unbounded"


def test_exact_redundant_rows():
    res = solve_lp_exact([1, 1], [[1, 1], [2, 2]], [3, 6])
    assert res.status == "optimal"
    assert res.value == 3


def test_float_matches_exact_and_scipy_random():
    rng = np.random.default_rng(31)
    for _ in range(30):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m, 8))
        A = rng.integers(-3, 4, size=(m, n)).astype(float)
        x_feas = rng.random(n)
        b = A @ x_feas
        c = rng.integers(0, 6, size=n).astype(float) + 0.5
        ours = solve_lp_float(c.tolist(), A.tolist(), b.tolist())
        ref = scipy_linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        assert ours.status == "optimal" and ref.status == 0
        assert ours.value == pytest.approx(ref.fun, abs=1e-7)
        exact = solve_lp_exact(
            [Fraction(v) for v in c],
            [[Fraction(v) for v in row] for row in A.tolist()],
            [Fraction(v) for v in b.tolist()],
        )
        assert exact.status == "optimal"
        assert float(exact.value) == pytest.approx(ref.fun, abs=1e-7)


def test_dispatch_by_kingdom():
    res = solve_lp([Fraction(1), Fraction(1)], [[Fraction(1), Fraction(2)]], [Fraction(4)])
    assert isinstance(res.value, Fraction)
    res = solve_lp([1.0, 1.0], [[1.0, 2.0]], [4.0])
    assert isinstance(res.value, float)


def test_support_bounded_by_rows():
    rng = np.random.default_rng(32)
    A = rng.standard_normal((4, 40))
    x_feas = np.abs(rng.random(40))
    b = A @ x_feas
    c = np.abs(rng.standard_normal(40)) + 0.1
    res = solve_lp_float(c.tolist(), A.tolist(), b.tolist())
    assert res.status == "optimal"
    assert len(res.support) <= 4


def test_deterministic_repeat():
    rng = np.random.default_rng(33)
    A = rng.standard_normal((3, 20))
    b = A @ np.abs(rng.random(20))
    c = np.abs(rng.standard_normal(20)) + 0.1
    r1 = solve_lp_float(c.tolist(), A.tolist(), b.tolist())
    r2 = solve_lp_float(c.tolist(), A.tolist(), b.tolist())
    assert r1.x == r2.x and r1.value == r2.value and r1.basis == r2.basis
