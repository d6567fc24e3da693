"""Rational approximation and integer-kernel witnesses."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from gaugeforge import GrassmannPoint, KVector, wedge_vectors
from gaugeforge._rat import dot, to_vec
from gaugeforge.errors import DegeneracyError
from gaugeforge.rational import (
    QnkWitness,
    RationalSimpleVector,
    extend_to_basis,
    gram_schmidt,
    qnk_witness,
    rational_simple_approx,
    rational_slope_witness,
)


def random_point(rng, n, k):
    q, r = np.linalg.qr(rng.standard_normal((n, k)))
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    return GrassmannPoint.from_frame([tuple(q[:, j]) for j in range(k)])


# -- Gram-Schmidt -----------------------------------------------------------


def test_gram_schmidt_identity_on_orthogonal_input():
    basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert gram_schmidt(basis) == [to_vec(v) for v in basis]


def test_gram_schmidt_hand_checked_step():
    ys = gram_schmidt([(1, 1), (0, 1)])
    assert ys == [(Fraction(1), Fraction(1)), (Fraction(-1, 2), Fraction(1, 2))]


def test_gram_schmidt_prefix_wedges_and_orthogonality():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        ws = [[Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(n)]
              for _ in range(n)]
        try:
            ys = gram_schmidt(ws)
        except DegeneracyError:
            continue
        for i in range(n):
            for j in range(i):
                assert dot(ys[i], ys[j]) == 0
            assert (wedge_vectors(ys[: i + 1]) - wedge_vectors([to_vec(w) for w in ws[: i + 1]])).is_zero


def test_gram_schmidt_rejects_dependent():
    with pytest.raises(DegeneracyError):
        gram_schmidt([(1, 2), (2, 4)])


# -- rational simple approximation -------------------------------------------


def test_approx_on_already_rational_plane():
    p = GrassmannPoint.basis_point(4, (1, 2))
    z = rational_simple_approx(p, 1e-6)
    assert (z.vec.to_float() - p.vec).norm() < 1e-6
    assert z.vec.is_rational


def test_approx_diagonal_plane_small_eps():
    p = GrassmannPoint.from_frame([(1, 0, 0), (0, 1, 1)])
    z = rational_simple_approx(p, 1e-3)
    assert (z.vec.to_float() - p.vec).norm() < 1e-3
    w = qnk_witness(z)
    assert w.verify()


def test_approx_error_bound_random():
    rng = np.random.default_rng(22)
    for eps in (1e-1, 1e-3, 1e-6):
        for _ in range(8):
            n = int(rng.integers(3, 7))
            k = int(rng.integers(1, min(3, n - 1) + 1))
            p = random_point(rng, n, k)
            z = rational_simple_approx(p, eps)
            assert (z.vec.to_float() - p.vec).norm() < eps


def test_approx_rejects_bad_eps():
    p = GrassmannPoint.basis_point(3, (1,))
    with pytest.raises(ValueError):
        rational_simple_approx(p, 0.0)
    with pytest.raises(ValueError):
        rational_simple_approx(p, 1.5)


# -- Q(n,k) witnesses ---------------------------------------------------------


def test_witness_axis_plane_r3():
    z = RationalSimpleVector.from_factors([(1, 0, 0), (0, 1, 0)])
    w = qnk_witness(z)
    assert w.f.entries == ((Fraction(0), Fraction(0), Fraction(1)),)
    assert abs(w.t) == 1
    assert w.verify()


def test_witness_exact_residual_and_kernel():
    rng = np.random.default_rng(23)
    for _ in range(10):
        n = int(rng.integers(3, 7))
        k = int(rng.integers(1, n))
        rows = [[Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(n)]
                for _ in range(k)]
        try:
            z = RationalSimpleVector.from_factors(rows)
        except DegeneracyError:
            continue
        w = qnk_witness(z)
        assert not w.residual().coords
        assert w.verify()
        # kernel of f is exactly the plane: sympy oracle
        m = sympy.Matrix([[sympy.Rational(x) for x in row] for row in w.f.entries])
        null = m.nullspace()
        assert len(null) == k


def test_witness_scaling_homogeneity():
    z = RationalSimpleVector.from_factors([(1, 2, 0), (0, 1, 3)])
    w = qnk_witness(z)
    z2 = RationalSimpleVector.from_factors([(3, 6, 0), (0, 1, 3)])
    w2 = qnk_witness(z2)
    assert w2.f == w.f
    assert w2.t == 3 * w.t


def test_rational_slope_witness_axis():
    w = rational_slope_witness([(1, 0, 0, 0), (0, 1, 0, 0)])
    assert w.verify()
    got = {tuple(int(x) for x in row) for row in w.f.entries}
    assert got == {(0, 0, 1, 0), (0, 0, 0, 1)}


def test_rational_slope_witness_generic():
    w = rational_slope_witness([(1, 2, 0), (0, 1, 3)])
    assert w.verify()
    for v in ((1, 2, 0), (0, 1, 3)):
        assert all(x == 0 for x in w.f.apply(v))


def test_rational_slope_rejects_dependent():
    with pytest.raises(DegeneracyError):
        rational_slope_witness([(1, 2, 0), (2, 4, 0)])


def test_extend_to_basis():
    out = extend_to_basis([(1, 1, 0)], 3)
    assert len(out) == 3
    from gaugeforge._rat import rank

    assert rank(out) == 3
