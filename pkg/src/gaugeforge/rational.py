"""Rational points on the Grassmannian.

Implements the constructive side of density: exact Gram-Schmidt over Q,
rational simple approximation of unit simple k-vectors, and integer-kernel
witnesses showing that the approximants span planes of rational slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _rat
from .errors import ConsistencyError, DegeneracyError
from .exterior import (
    GrassmannPoint,
    KVector,
    LinearMap,
    associated_space,
    hodge_star,
    inner,
    minors,
    wedge_vectors,
)


@dataclass(frozen=True)
class RationalSimpleVector:
    """A nonzero wedge of k rational vectors; simple by construction."""

    factors: tuple[tuple[Fraction, ...], ...]
    vec: KVector

    @staticmethod
    def from_factors(factors) -> "RationalSimpleVector":
        rows = tuple(_rat.to_vec(f) for f in factors)
        v = wedge_vectors(rows)
        if v.is_zero:
            raise DegeneracyError("factors are linearly dependent")
        return RationalSimpleVector(rows, v)

    @property
    def n(self) -> int:
        return self.vec.n

    @property
    def k(self) -> int:
        return self.vec.k

    def norm_sq(self) -> Fraction:
        return self.vec.norm_sq()

    def unit_point(self) -> GrassmannPoint:
        ns = self.norm_sq()
        root = _rat.sqrt_if_square(ns)
        exact = self.vec / root if root is not None else None
        unit = self.vec.to_float() / math.sqrt(float(ns))
        return GrassmannPoint(unit, frame=self.factors, exact_vec=exact)


@dataclass(frozen=True)
class QnkWitness:
    """Integer-row map f whose kernel is the plane of ``target``.

    The Hodge dual of the wedge of the rows of f is exactly proportional to
    the target vector; ``t`` is the exact rational ratio.
    """

    f: LinearMap
    t: Fraction
    target: RationalSimpleVector

    def hodge_dual(self) -> KVector:
        return hodge_star(wedge_vectors(self.f.entries))

    def residual(self) -> KVector:
        """target.vec - t * (dual of the rows of f); zero for a valid witness."""
        return self.target.vec - self.t * self.hodge_dual()

    def verify(self) -> bool:
        if self.residual().coords:
            return False
        if any(Fraction(x).denominator != 1 for row in self.f.entries for x in row):
            return False
        for w in self.target.factors:
            if any(x != 0 for x in self.f.apply(w)):
                return False
        return _rat.rank([_rat.to_vec(r) for r in self.f.entries]) == self.f.rows


def gram_schmidt(vectors) -> list[tuple[Fraction, ...]]:
    """Exact orthogonalization; preserves every prefix wedge.

    y_1 = w_1 and y_j = w_j - sum_{i<j} (w_j . y_i)/|y_i|^2 y_i, all over Q.
    """
    ws = [_rat.to_vec(w) for w in vectors]
    ys: list[tuple[Fraction, ...]] = []
    norms: list[Fraction] = []
    for w in ws:
        y = w
        for prev, ns in zip(ys, norms):
            coeff = _rat.dot(w, prev) / ns
            y = _rat.sub(y, _rat.scale(prev, coeff))
        ns = _rat.dot(y, y)
        if ns == 0:
            raise DegeneracyError("input vectors are linearly dependent")
        ys.append(y)
        norms.append(ns)
    return ys


def _orthonormal_frame(point: GrassmannPoint) -> np.ndarray:
    """Floating orthonormal rows spanning the plane, oriented with the point."""
    k = point.k
    if point.frame is not None:
        rows = np.array([[float(x) for x in r] for r in point.frame])
        q, _ = np.linalg.qr(rows.T)
        frame = q[:, :k].T
    else:
        rows = associated_space(point.vec)
        frame = np.array(rows, dtype=float)
        q, _ = np.linalg.qr(frame.T)
        frame = q[:, :k].T
    w = wedge_vectors([tuple(r) for r in frame])
    s = float(inner(w, point.vec))
    if abs(abs(s) - 1.0) > 1e-6:
        raise ConsistencyError("frame does not reproduce the point up to sign")
    if s < 0:
        frame = frame.copy()
        frame[0] = -frame[0]
    return frame


def rational_simple_approx(point: GrassmannPoint, eps: float) -> RationalSimpleVector:
    """Rational simple vector within eps of a unit simple one.

    Rounds an oriented orthonormal frame coordinatewise by best rational
    approximation (continued fractions via Fraction.limit_denominator); the
    per-factor perturbation stays below 2^-k * eps, which bounds the wedge
    error below eps.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie strictly between 0 and 1")
    n, k = point.n, point.k
    frame = _orthonormal_frame(point)
    per_factor = eps * 2.0 ** (-k)
    den_bound = math.ceil(math.sqrt(n) / per_factor)
    rows = [
        tuple(Fraction(float(x)).limit_denominator(den_bound) for x in r) for r in frame
    ]
    zeta = RationalSimpleVector.from_factors(rows)
    err = (zeta.vec.to_float() - point.vec).norm()
    if err >= eps:
        raise ConsistencyError(f"approximation error {err} exceeds eps={eps}")
    return zeta


def extend_to_basis(vectors, n: int) -> list[tuple[Fraction, ...]]:
    """Complete independent rational vectors to a basis of Q^n with standard vectors."""
    rows = [_rat.to_vec(v) for v in vectors]
    if _rat.rank(rows) != len(rows):
        raise DegeneracyError("input vectors are linearly dependent")
    out = list(rows)
    for i in range(n):
        if len(out) == n:
            break
        cand = tuple(Fraction(int(j == i)) for j in range(n))
        if _rat.rank(out + [cand]) > len(out):
            out.append(cand)
    if len(out) != n:
        raise ConsistencyError("failed to extend to a basis")
    return out


def _witness_from_rows(rows, target: RationalSimpleVector) -> QnkWitness:
    scale = _rat.lcm_denominators(rows)
    int_rows = [tuple(x * scale for x in r) for r in rows]
    f = LinearMap.from_rows(int_rows)
    dual = hodge_star(wedge_vectors(int_rows))
    pivot = next((idx for idx, c in dual.coords.items() if c != 0), None)
    if pivot is None:
        raise DegeneracyError("kernel rows are linearly dependent")
    t = target.vec.coordinate(pivot) / dual.coordinate(pivot)
    if t == 0 or (target.vec - t * dual).coords:
        raise ConsistencyError("witness dual is not proportional to the target")
    return QnkWitness(f, t, target)


def qnk_witness(zeta: RationalSimpleVector) -> QnkWitness:
    """Integer-kernel witness for a rational simple vector.

    Extends the factors to a rational basis, orthogonalizes exactly, clears
    denominators of the trailing rows and takes them as the rows of f.  The
    ratio t is verified exactly, and t^2 is checked against its closed form
    in the orthogonalized norms.
    """
    n, k = zeta.n, zeta.k
    ys = gram_schmidt(extend_to_basis(zeta.factors, n))
    scale = _rat.lcm_denominators(ys[k:])
    rows = [tuple(x * scale for x in y) for y in ys[k:]]
    witness = _witness_from_rows(rows, zeta)
    norm_head = math.prod((_rat.dot(y, y) for y in ys[:k]), start=Fraction(1))
    norm_tail = math.prod((_rat.dot(y, y) for y in ys[k:]), start=Fraction(1))
    expected_t_sq = Fraction(scale) ** (2 * (k - n)) * norm_head / norm_tail
    if witness.t * witness.t != expected_t_sq:
        raise ConsistencyError("witness ratio does not match its closed form")
    return witness


def rational_slope_witness(spanning) -> QnkWitness:
    """Witness that the span of rational vectors is the kernel of an integer map."""
    target = RationalSimpleVector.from_factors(spanning)
    rows = _rat.nullspace(list(target.factors), target.n)
    return _witness_from_rows(rows, target)
