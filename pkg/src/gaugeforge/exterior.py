"""Exact and floating exterior algebra over R^n.

k-vectors are stored sparsely as coordinates over the lexicographically
ordered basis of increasing multi-indices; the stored coordinates *are* the
isometric coordinate image of the vector, so no separate coordinate map is
needed.  Every value lives in exactly one scalar kingdom: exact rationals
(``fractions.Fraction``, with ``int`` accepted) or IEEE doubles.  Conversion
is explicit and one-directional, rational -> float.  Exactness is reserved
for algebraic identities (wedge, Hodge star, elimination, minors); norms and
Grassmannian sampling are floating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import _rat
from .errors import DegeneracyError

MAX_DIMENSION = 12  # index enumeration is exponential beyond desk scale

TAU_UNIT = 1e-12
TAU_RANK = 1e-9

Scalar = Fraction | int | float


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True, order=True)
class MultiIndex:
    """A strictly increasing tuple of k indices drawn from {1..n}."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        if not 0 < self.n <= MAX_DIMENSION:
            raise ValueError(f"ambient dimension must be in 1..{MAX_DIMENSION}")
        for i, e in enumerate(self.entries):
            if not 1 <= e <= self.n:
                raise ValueError(f"index {e} outside 1..{self.n}")
            if i and e <= self.entries[i - 1]:
                raise ValueError("entries must be strictly increasing")

    @property
    def k(self) -> int:
        return len(self.entries)

    def complement(self) -> "MultiIndex":
        present = set(self.entries)
        return MultiIndex(tuple(i for i in range(1, self.n + 1) if i not in present), self.n)

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.entries)


@lru_cache(maxsize=None)
def basis_indices(n: int, k: int) -> tuple[MultiIndex, ...]:
    """All increasing multi-indices of length k in {1..n}, lexicographic."""
    if not 0 < n <= MAX_DIMENSION:
        raise ValueError(f"ambient dimension must be in 1..{MAX_DIMENSION}")
    if not 0 <= k <= n:
        raise ValueError(f"degree must satisfy 0 <= k <= n, got k={k}, n={n}")
    return tuple(MultiIndex(c, n) for c in combinations(range(1, n + 1), k))


def _merge_indices(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted merge of two disjoint index tuples; None if they share an index."""
    if set(a) & set(b):
        return None
    inversions = sum(1 for x in a for y in b if x > y)
    merged = tuple(sorted(a + b))
    return (-1 if inversions % 2 else 1), merged


def _concat_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class KVector:
    """A k-vector in the k-th exterior power of R^n, one scalar kingdom per value."""

    n: int
    k: int
    coords: dict[MultiIndex, Scalar]

    def __post_init__(self):
        basis_indices(self.n, self.k)  # validates (n, k)
        has_float = any(isinstance(c, float) for c in self.coords.values())
        cleaned = {}
        for idx, c in self.coords.items():
            if idx.n != self.n or idx.k != self.k:
                raise ValueError(f"index {idx} does not match a ({self.n},{self.k})-vector")
            if isinstance(c, Fraction):
                if has_float:
                    raise ValueError("rational and floating coordinates mixed in one value")
            elif isinstance(c, bool) or not isinstance(c, (int, float)):
                raise TypeError(f"unsupported scalar {type(c).__name__}")
            elif isinstance(c, int):
                # plain integers are exact in either kingdom
                c = float(c) if has_float else Fraction(c)
            if c != 0:
                cleaned[idx] = c
        object.__setattr__(self, "coords", cleaned)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int, k: int) -> "KVector":
        return KVector(n, k, {})

    @staticmethod
    def basis(n: int, entries, exact: bool = True) -> "KVector":
        idx = MultiIndex(tuple(entries), n)
        return KVector(n, idx.k, {idx: Fraction(1) if exact else 1.0})

    @staticmethod
    def from_entry_map(n: int, k: int, mapping) -> "KVector":
        coords = {MultiIndex(tuple(e), n): v for e, v in mapping.items()}
        return KVector(n, k, coords)

    @staticmethod
    def from_vector(v) -> "KVector":
        """Degree-1 vector from a coordinate sequence."""
        n = len(v)
        return KVector(n, 1, {MultiIndex((i + 1,), n): x for i, x in enumerate(v)})

    @staticmethod
    def from_dense(n: int, k: int, values) -> "KVector":
        idxs = basis_indices(n, k)
        if len(values) != len(idxs):
            raise ValueError("dense coordinate length mismatch")
        return KVector(n, k, {idx: v for idx, v in zip(idxs, values)})

    # -- kingdom -----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        """True for exact values; the zero vector counts as both kingdoms."""
        return all(is_exact(c) for c in self.coords.values())

    def to_float(self) -> "KVector":
        return KVector(self.n, self.k, {i: float(c) for i, c in self.coords.items()})

    # -- access ------------------------------------------------------------

    def coordinate(self, entries) -> Scalar:
        idx = entries if isinstance(entries, MultiIndex) else MultiIndex(tuple(entries), self.n)
        return self.coords.get(idx, Fraction(0) if self.is_rational else 0.0)

    def coordinates(self) -> list[Scalar]:
        """Coordinates in lexicographic basis order (the isometric image)."""
        zero = Fraction(0) if self.is_rational else 0.0
        return [self.coords.get(idx, zero) for idx in basis_indices(self.n, self.k)]

    def dense(self) -> np.ndarray:
        return np.array([float(self.coords.get(idx, 0.0)) for idx in basis_indices(self.n, self.k)])

    def norm_sq(self) -> Scalar:
        if self.is_rational:
            return sum((c * c for c in self.coords.values()), Fraction(0))
        return math.fsum(c * c for c in self.coords.values())

    def norm(self) -> float:
        return math.sqrt(float(self.norm_sq()))

    @property
    def is_zero(self) -> bool:
        return not self.coords

    # -- arithmetic ----------------------------------------------------------

    def _combine(self, other: "KVector", sign: int) -> "KVector":
        if (self.n, self.k) != (other.n, other.k):
            raise ValueError("cannot combine k-vectors of different (n, k)")
        self._require_same_kingdom(other)
        out = dict(self.coords)
        for idx, c in other.coords.items():
            out[idx] = out.get(idx, 0) + sign * c
        return KVector(self.n, self.k, out)

    def _require_same_kingdom(self, other: "KVector"):
        if self.coords and other.coords and self.is_rational != other.is_rational:
            raise ValueError("rational/floating kingdoms mixed; convert explicitly with to_float()")

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return KVector(self.n, self.k, {i: -c for i, c in self.coords.items()})

    def __mul__(self, s):
        if self.coords and self.is_rational and not is_exact(s):
            raise ValueError("scaling an exact value by a float; convert explicitly")
        return KVector(self.n, self.k, {i: c * s for i, c in self.coords.items()})

    __rmul__ = __mul__

    def __truediv__(self, s):
        if self.is_rational and is_exact(s):
            return self * (Fraction(1) / Fraction(s))
        return KVector(self.n, self.k, {i: float(c) / s for i, c in self.coords.items()})


def wedge(a: KVector, b: KVector) -> KVector:
    """Exterior product; bilinear, associative, graded-anticommutative."""
    if a.n != b.n:
        raise ValueError("wedge requires the same ambient dimension")
    k = a.k + b.k
    if k > a.n:
        raise ValueError(f"wedge degree {k} exceeds ambient dimension {a.n}")
    a._require_same_kingdom(b)
    out: dict[MultiIndex, Scalar] = {}
    for ia, ca in a.coords.items():
        for ib, cb in b.coords.items():
            merged = _merge_indices(ia.entries, ib.entries)
            if merged is None:
                continue
            sign, ent = merged
            idx = MultiIndex(ent, a.n)
            out[idx] = out.get(idx, 0) + sign * ca * cb
    return KVector(a.n, k, out)


def wedge_vectors(vectors, n: int | None = None) -> KVector:
    """Wedge of a list of 1-vectors (rows); empty list gives the unit 0-vector."""
    vectors = list(vectors)
    if not vectors:
        if n is None:
            raise ValueError("ambient dimension required for an empty wedge")
        return KVector(n, 0, {MultiIndex((), n): Fraction(1)})
    out = KVector.from_vector(vectors[0])
    for v in vectors[1:]:
        out = wedge(out, KVector.from_vector(v))
    return out


def inner(a: KVector, b: KVector) -> Scalar:
    """Coordinatewise symmetric bilinear product (basis vectors orthonormal)."""
    if (a.n, a.k) != (b.n, b.k):
        raise ValueError("inner product requires matching (n, k)")
    a._require_same_kingdom(b)
    common = a.coords.keys() & b.coords.keys()
    if a.is_rational and b.is_rational:
        return sum((a.coords[i] * b.coords[i] for i in common), Fraction(0))
    return math.fsum(float(a.coords[i]) * float(b.coords[i]) for i in common)


def hodge_star(a: KVector) -> KVector:
    """Hodge star for the standard orientation; *u_idx = sign * u_complement."""
    out: dict[MultiIndex, Scalar] = {}
    for idx, c in a.coords.items():
        comp = idx.complement()
        out[comp] = _concat_sign(idx.entries, comp.entries) * c
    return KVector(a.n, a.n - a.k, out)


def _wedge_matrix_rows(a: KVector):
    """Rows of the map v -> v ^ a over the degree-(k+1) basis; columns index e_i."""
    n = a.n
    targets = basis_indices(n, a.k + 1)
    pos = {idx: r for r, idx in enumerate(targets)}
    rows = [[Fraction(0)] * n for _ in targets] if a.is_rational else [[0.0] * n for _ in targets]
    for i in range(1, n + 1):
        for idx, c in a.coords.items():
            merged = _merge_indices((i,), idx.entries)
            if merged is None:
                continue
            sign, ent = merged
            rows[pos[MultiIndex(ent, n)]][i - 1] += sign * c
    return rows


def associated_space(a: KVector, tol: float | None = None) -> list[tuple]:
    """Basis of {v : v ^ a = 0}, exact over rationals, SVD-thresholded over floats.

    The returned vectors are coordinate tuples; for a simple a they span the
    oriented plane that a represents.
    """
    if a.is_zero:
        raise ValueError("associated space of the zero vector is undefined")
    if a.k == a.n:
        eye = np.eye(a.n)
        if a.is_rational:
            return [tuple(Fraction(int(x)) for x in row) for row in eye]
        return [tuple(float(x) for x in row) for row in eye]
    rows = _wedge_matrix_rows(a)
    if a.is_rational:
        return _rat.nullspace([tuple(r) for r in rows], a.n)
    mat = np.array(rows, dtype=float)
    threshold = tol if tol is not None else TAU_RANK * max(a.norm(), 1e-300)
    _, s, vt = np.linalg.svd(mat)
    null_rows = [vt[i] for i in range(a.n) if i >= len(s) or s[i] <= threshold]
    return [tuple(float(x) for x in row) for row in null_rows]


def is_simple(a: KVector, tol: float | None = None) -> bool:
    """A nonzero k-vector is simple iff its associated space has dimension k."""
    return len(associated_space(a, tol=tol)) == a.k


@dataclass(frozen=True)
class LinearMap:
    """Dense linear map; column j is the image of the j-th basis vector."""

    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty matrix")
        width = len(self.entries[0])
        has_float = any(isinstance(x, float) for row in self.entries for x in row)
        norm_rows = []
        for row in self.entries:
            if len(row) != width:
                raise ValueError("ragged matrix")
            if has_float:
                if any(isinstance(x, Fraction) for x in row):
                    raise ValueError("rational and floating entries mixed in one matrix")
                norm_rows.append(tuple(float(x) for x in row))
            else:
                norm_rows.append(tuple(Fraction(x) for x in row))
        object.__setattr__(self, "entries", tuple(norm_rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def is_rational(self) -> bool:
        return all(is_exact(x) for row in self.entries for x in row)

    @staticmethod
    def identity(n: int) -> "LinearMap":
        return LinearMap(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @staticmethod
    def scaling(n: int, t) -> "LinearMap":
        return LinearMap(tuple(tuple((t if i == j else 0) for j in range(n)) for i in range(n)))

    @staticmethod
    def from_columns(columns) -> "LinearMap":
        cols = [tuple(c) for c in columns]
        return LinearMap(tuple(tuple(col[i] for col in cols) for i in range(len(cols[0]))))

    @staticmethod
    def from_rows(rows) -> "LinearMap":
        return LinearMap(tuple(tuple(r) for r in rows))

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def transpose(self) -> "LinearMap":
        return LinearMap(tuple(self.column(j) for j in range(self.cols)))

    def apply(self, v) -> tuple:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum(row[j] * v[j] for j in range(self.cols)) for row in self.entries)

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other."""
        if self.cols != other.rows:
            raise ValueError("shape mismatch in composition")
        return LinearMap.from_columns([self.apply(other.column(j)) for j in range(other.cols)])

    def dense(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def is_orthogonal_injection(self, tol: float = 1e-10) -> bool:
        """True when the adjoint composed with the map is the identity."""
        if self.is_rational:
            gram = [[_rat.dot(_rat.to_vec(self.column(i)), _rat.to_vec(self.column(j)))
                     for j in range(self.cols)] for i in range(self.cols)]
            return all(gram[i][j] == (1 if i == j else 0)
                       for i in range(self.cols) for j in range(self.cols))
        d = self.dense()
        return bool(np.max(np.abs(d.T @ d - np.eye(self.cols))) <= tol)


def _submatrix_det(f: LinearMap, row_idx, col_idx, exact: bool):
    rows = [[f.entries[i - 1][j] for j in col_idx] for i in row_idx]
    if not rows:
        return Fraction(1) if exact else 1.0
    if exact:
        return _rat.det([tuple(r) for r in rows])
    return float(np.linalg.det(np.array(rows, dtype=float)))


def minors(f: LinearMap) -> KVector:
    """All k x k minors of an n x k matrix, as a k-vector over the target space.

    Equals the image of the source orientation under the induced map on the
    k-th exterior power, so for an orthogonal injection it is the unit simple
    vector of the image plane.
    """
    n, k = f.rows, f.cols
    if k > n:
        raise ValueError("minor vector requires rows >= cols")
    exact = f.is_rational
    cols = tuple(range(k))
    out = {}
    for idx in basis_indices(n, k):
        out[idx] = _submatrix_det(f, idx.entries, cols, exact)
    return KVector(n, k, out)


def induced_map(f: LinearMap, a: KVector) -> KVector:
    """Apply the k-th exterior power of f to a; on wedges of vectors it wedges images."""
    if f.cols != a.n:
        raise ValueError("map domain does not match the ambient space of the vector")
    m, k = f.rows, a.k
    if k > m:
        raise ValueError("target dimension too small for the degree")
    exact = a.is_rational
    if a.coords and exact != f.is_rational and not a.is_zero:
        raise ValueError("rational/floating kingdoms mixed; convert explicitly")
    out: dict[MultiIndex, Scalar] = {}
    for src, c in a.coords.items():
        cols = tuple(j - 1 for j in src.entries)
        for idx in basis_indices(m, k):
            d = _submatrix_det(f, idx.entries, cols, exact)
            if d != 0:
                out[idx] = out.get(idx, 0) + c * d
    return KVector(m, k, out)


@dataclass(frozen=True)
class GrassmannPoint:
    """A unit simple k-vector: an oriented k-plane.

    ``vec`` is floating and unit within TAU_UNIT.  ``frame`` optionally holds
    rational rows spanning the plane (a simplicity witness).  ``exact_vec``
    is set when the point happens to have exactly rational unit coordinates.
    """

    vec: KVector
    frame: tuple[tuple[Fraction, ...], ...] | None = None
    exact_vec: KVector | None = field(default=None, compare=False)

    def __post_init__(self):
        if abs(self.vec.norm() - 1.0) > TAU_UNIT:
            raise ValueError("Grassmann point must be unit within tolerance")

    @property
    def n(self) -> int:
        return self.vec.n

    @property
    def k(self) -> int:
        return self.vec.k

    def validate(self, tol: float | None = None) -> bool:
        return is_simple(self.vec, tol=tol)

    @staticmethod
    def from_kvector(v: KVector, normalize: bool = True, check: bool = True) -> "GrassmannPoint":
        if v.is_zero:
            raise ValueError("cannot normalize the zero vector")
        exact = None
        if v.is_rational and v.norm_sq() == 1:
            exact = v
        w = v.to_float() if v.is_rational else v
        if normalize:
            w = w / w.norm()
        if check and not is_simple(w):
            raise ValueError("k-vector is not simple")
        return GrassmannPoint(w, exact_vec=exact)

    @staticmethod
    def from_frame(rows) -> "GrassmannPoint":
        """Oriented plane spanned by k independent rows (rational or float)."""
        rows = [tuple(r) for r in rows]
        exact_rows = all(is_exact(x) for r in rows for x in r)
        w = wedge_vectors(rows)
        if w.is_zero:
            raise DegeneracyError("frame rows are linearly dependent")
        if exact_rows:
            ns = w.norm_sq()
            root = _rat.sqrt_if_square(ns)
            exact = w / root if root is not None else None
            unit = w.to_float() / math.sqrt(float(ns))
            frame = tuple(_rat.to_vec(r) for r in rows)
            return GrassmannPoint(unit, frame=frame, exact_vec=exact)
        return GrassmannPoint(w / w.norm())

    @staticmethod
    def basis_point(n: int, entries, sign: int = 1) -> "GrassmannPoint":
        exact = KVector.basis(n, entries) * sign
        frame = tuple(
            tuple(Fraction(int(j + 1 == e)) for j in range(n)) for e in entries
        )
        return GrassmannPoint(exact.to_float(), frame=frame, exact_vec=exact)

    def __neg__(self) -> "GrassmannPoint":
        return GrassmannPoint(
            -self.vec,
            frame=self.frame,
            exact_vec=-self.exact_vec if self.exact_vec is not None else None,
        )

    def inner(self, other: "GrassmannPoint") -> float:
        return float(inner(self.vec, other.vec))

    def dense(self) -> np.ndarray:
        return self.vec.dense()
