"""Polyhedral k-chain calculus.

Chains are finite positive-coefficient combinations of oriented simplices
with rational (or, for pushed cubes over floating frames, floating)
vertices.  Boundary, mass, the atomic Gaussian image on the Grassmannian,
anisotropic energy, Kuhn-triangulated unit cube images, exact overlay-based
boundary comparison, and single ellipticity instances all live here.

Mass, total variation, and energy deliberately share one per-atom
accumulation path, so the identities mass = ||gaussian||_TV and
energy(area) = mass hold bitwise, and exactly (as Fractions) whenever every
Gram determinant involved is a perfect square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import _overlay, _rat
from .errors import (
    ConsistencyError,
    DegeneracyError,
    ReductionUnsupportedError,
    TestPairError,
)
from .exterior import (
    GrassmannPoint,
    KVector,
    LinearMap,
    MultiIndex,
    basis_indices,
    is_exact,
    wedge_vectors,
)
from .integrands import Integrand, evaluate

TAU_ATOM = 1e-9
N_FORMS = 40
FORM_DEGREE = 3
TAU_FORM = 1e-9


def _vertex_is_exact(v) -> bool:
    return all(is_exact(x) for x in v)


@dataclass(frozen=True)
class OrientedSimplex:
    """k+1 affinely independent points with the orientation of their listing."""

    vertices: tuple[tuple, ...]
    edge_wedge: KVector = field(init=False, compare=False, repr=False)
    volume: float = field(init=False, compare=False)
    volume_exact: Fraction | None = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        verts = tuple(tuple(v) for v in self.vertices)
        if not verts:
            raise DegeneracyError("simplex needs at least one vertex")
        n = len(verts[0])
        if any(len(v) != n for v in verts):
            raise DegeneracyError("vertices of mixed ambient dimension")
        exact = all(_vertex_is_exact(v) for v in verts)
        if exact:
            verts = tuple(tuple(Fraction(x) for x in v) for v in verts)
        else:
            verts = tuple(tuple(float(x) for x in v) for v in verts)
        object.__setattr__(self, "vertices", verts)
        k = len(verts) - 1
        if k == 0:
            w = KVector(n, 0, {MultiIndex((), n): Fraction(1) if exact else 1.0})
            object.__setattr__(self, "edge_wedge", w)
            object.__setattr__(self, "volume", 1.0)
            object.__setattr__(self, "volume_exact", Fraction(1))
            return
        diffs = [
            tuple(a - b for a, b in zip(verts[i + 1], verts[i])) for i in range(k)
        ]
        w = wedge_vectors(diffs)
        ns = w.norm_sq()
        if (exact and ns == 0) or (not exact and math.sqrt(float(ns)) <= 1e-12):
            raise DegeneracyError("affinely dependent vertices")
        object.__setattr__(self, "edge_wedge", w)
        kfact = math.factorial(k)
        exact_vol = None
        if exact:
            root = _rat.sqrt_if_square(ns)
            if root is not None:
                exact_vol = root / kfact
        object.__setattr__(self, "volume_exact", exact_vol)
        vol = float(exact_vol) if exact_vol is not None else math.sqrt(float(ns)) / kfact
        object.__setattr__(self, "volume", vol)

    @property
    def n(self) -> int:
        return len(self.vertices[0])

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    @property
    def is_rational(self) -> bool:
        return self.edge_wedge.is_rational

    @property
    def tau(self) -> GrassmannPoint:
        w = self.edge_wedge
        if w.is_rational:
            unit = w.to_float() / math.sqrt(float(w.norm_sq()))
            return GrassmannPoint(unit)
        return GrassmannPoint(w / w.norm())

    def direction_key(self):
        """Canonical label of the oriented direction; exact in the rational kingdom."""
        w = self.edge_wedge
        if not w.is_rational:
            return None
        items = sorted(w.coords.items(), key=lambda kv: kv[0])
        lead = abs(items[0][1])
        return tuple((idx.entries, c / lead) for idx, c in items)

    def orientation_flipped(self) -> "OrientedSimplex":
        v = list(self.vertices)
        v[0], v[1] = v[1], v[0]
        return OrientedSimplex(tuple(v))


def make_simplex(vertices) -> OrientedSimplex:
    return OrientedSimplex(tuple(tuple(v) for v in vertices))


def _canonical_term(coeff, simplex: OrientedSimplex):
    order = sorted(range(len(simplex.vertices)), key=lambda i: simplex.vertices[i])
    inversions = sum(
        1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j]
    )
    sign = -1 if inversions % 2 else 1
    key = tuple(simplex.vertices[i] for i in order)
    return key, coeff * sign


@dataclass(frozen=True)
class PolyhedralChain:
    """Normal form: positive coefficients, canonical vertex ordering per simplex."""

    n: int
    k: int
    terms: tuple[tuple[Fraction | float, OrientedSimplex], ...]

    @staticmethod
    def from_terms(n: int, k: int, terms) -> "PolyhedralChain":
        acc: dict[tuple, object] = {}
        exact_coeffs = True
        for coeff, simplex in terms:
            if simplex.n != n or simplex.k != k:
                raise ValueError("simplex dimensions do not match the chain")
            if not is_exact(coeff):
                exact_coeffs = False
            key, signed = _canonical_term(coeff, simplex)
            acc[key] = acc.get(key, 0) + signed
        out = []
        for key, coeff in acc.items():
            if coeff == 0:
                continue
            if coeff > 0 or len(key) == 1:
                verts = key  # 0-chains keep signed coefficients: no swap available
            else:
                verts = (key[1], key[0]) + key[2:]
                coeff = -coeff
            out.append((Fraction(coeff) if exact_coeffs and is_exact(coeff) else coeff,
                        OrientedSimplex(verts)))
        out.sort(key=lambda t: t[1].vertices)
        return PolyhedralChain(n, k, tuple(out))

    @property
    def is_rational(self) -> bool:
        return all(is_exact(a) and s.is_rational for a, s in self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def __add__(self, other: "PolyhedralChain") -> "PolyhedralChain":
        if (self.n, self.k) != (other.n, other.k):
            raise ValueError("chain dimension mismatch")
        return PolyhedralChain.from_terms(self.n, self.k, self.terms + other.terms)

    def __neg__(self) -> "PolyhedralChain":
        return PolyhedralChain.from_terms(
            self.n, self.k, tuple((-a, s) for a, s in self.terms)
        )

    def __sub__(self, other: "PolyhedralChain") -> "PolyhedralChain":
        return self + (-other)

    def scaled(self, factor) -> "PolyhedralChain":
        return PolyhedralChain.from_terms(
            self.n, self.k, tuple((a * factor, s) for a, s in self.terms)
        )


def boundary(T: PolyhedralChain) -> PolyhedralChain:
    """Alternating-sign faces, extended linearly; exact cancellation in normal form."""
    if T.k < 1:
        raise ValueError("boundary needs chain degree at least 1")
    out = []
    for a, s in T.terms:
        for i in range(len(s.vertices)):
            face = s.vertices[:i] + s.vertices[i + 1 :]
            out.append((a if i % 2 == 0 else -a, OrientedSimplex(face)))
    return PolyhedralChain.from_terms(T.n, T.k - 1, out)


# -- Gaussian image, mass, energy ------------------------------------------------


@dataclass(frozen=True)
class AtomicGrassmannMeasure:
    """Finite signed atomic measure on the Grassmannian."""

    atoms: tuple[tuple[Fraction | float, GrassmannPoint], ...]
    keys: tuple = field(default=(), compare=False, repr=False)

    def total_variation(self):
        return _accumulate([abs(w) for w, _ in self.atoms])

    def total_mass(self):
        return _accumulate([w for w, _ in self.atoms])

    def integrate(self, F: Integrand) -> float:
        return math.fsum(float(w) * evaluate(F, p) for w, p in self.atoms)

    def scaled(self, factor) -> "AtomicGrassmannMeasure":
        return AtomicGrassmannMeasure(
            tuple((w * factor, p) for w, p in self.atoms), self.keys
        )

    def __sub__(self, other: "AtomicGrassmannMeasure") -> "AtomicGrassmannMeasure":
        merged = list(zip([w for w, _ in self.atoms], [p for _, p in self.atoms],
                          self.keys or [None] * len(self.atoms)))
        other_items = list(zip([w for w, _ in other.atoms], [p for _, p in other.atoms],
                               other.keys or [None] * len(other.atoms)))
        for w, p, key in other_items:
            merged.append((-w, p, key))
        return _merge_atoms(merged)


def _merge_atoms(items) -> AtomicGrassmannMeasure:
    """Merge (weight, point, key) triples; exact keys match exactly, floats within TAU_ATOM."""
    slots: list[list] = []
    for w, p, key in items:
        hit = None
        for slot in slots:
            if key is not None and slot[2] is not None:
                if key == slot[2]:
                    hit = slot
                    break
            elif float((slot[1].vec - p.vec).norm()) <= TAU_ATOM:
                hit = slot
                break
        if hit is None:
            slots.append([w, p, key])
        else:
            hit[0] = hit[0] + w
    atoms = tuple((s[0], s[1]) for s in slots if s[0] != 0)
    keys = tuple(s[2] for s in slots if s[0] != 0)
    return AtomicGrassmannMeasure(atoms, keys)


def _accumulate(weights):
    if all(is_exact(w) for w in weights):
        return sum(weights, Fraction(0))
    return math.fsum(float(w) for w in weights)


def gaussian_measure(T: PolyhedralChain, reduce_overlaps: bool = True) -> AtomicGrassmannMeasure:
    """Pushforward of the weighted volume to the Grassmannian: one atom per direction.

    Directions are merged exactly in the rational kingdom (canonical ray
    labels) and within TAU_ATOM otherwise.  Weights stay exact Fractions when
    every contributing volume is exactly rational.
    """
    if reduce_overlaps:
        T = _ensure_reduced(T)
    groups: dict = {}
    order: list = []
    float_reps: list[tuple[np.ndarray, object]] = []
    for a, s in T.terms:
        key = s.direction_key()
        if key is None:
            dense = s.tau.dense()
            key = None
            for rep, existing in float_reps:
                if float(np.linalg.norm(rep - dense)) <= TAU_ATOM:
                    key = existing
                    break
            if key is None:
                key = ("float", len(float_reps))
                float_reps.append((dense, key))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((a, s))
    atoms = []
    keys = []
    for key in order:
        members = groups[key]
        parts = []
        exact_ok = True
        for a, s in members:
            if is_exact(a) and s.volume_exact is not None:
                parts.append(Fraction(a) * s.volume_exact)
            else:
                exact_ok = False
                parts.append(float(a) * s.volume)
        weight = sum(parts, Fraction(0)) if exact_ok else math.fsum(float(p) for p in parts)
        if weight == 0:
            continue
        atoms.append((weight, members[0][1].tau))
        keys.append(key if not (isinstance(key, tuple) and key and key[0] == "float") else None)
    return AtomicGrassmannMeasure(tuple(atoms), tuple(keys))


def mass(T: PolyhedralChain) -> float:
    """Total weighted volume; literally the total variation of the Gaussian image."""
    return float(_accumulate([w for w, _ in gaussian_measure(T).atoms]))


def mass_exact(T: PolyhedralChain) -> Fraction | None:
    """Exact mass when every atom weight is exactly rational, else None."""
    weights = [w for w, _ in gaussian_measure(T).atoms]
    if all(is_exact(w) for w in weights):
        return sum(weights, Fraction(0))
    return None


def energy(F: Integrand, T: PolyhedralChain) -> float:
    """Anisotropic energy: integral of F against the Gaussian image."""
    return math.fsum(float(w) * evaluate(F, p) for w, p in gaussian_measure(T).atoms)


def total_variation(measure: AtomicGrassmannMeasure) -> float:
    return float(_accumulate([abs(w) for w, _ in measure.atoms]))


# -- reduction (overlay) -----------------------------------------------------------


def _hull_key(vertices):
    base = _rat.to_vec(vertices[0])
    dirs = [_rat.sub(_rat.to_vec(v), base) for v in vertices[1:]]
    D, pivots = _rat.rref(dirs)
    correction = base
    for row, p in zip(D, pivots):
        correction = _rat.sub(correction, _rat.scale(row, base[p]))
    return (tuple(D), tuple(pivots), tuple(correction))


def _hull_coords(x, key):
    _, pivots, b = key
    rel = _rat.sub(_rat.to_vec(x), b)
    return tuple(rel[p] for p in pivots)


def _hull_point(coords, key):
    D, _, b = key
    out = list(b)
    for t, row in zip(coords, D):
        out = [a + t * r for a, r in zip(out, row)]
    return tuple(out)


def _group_by_hull(terms):
    groups: dict = {}
    order = []
    for a, s in terms:
        key = _hull_key(s.vertices)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((a, s))
    return [(key, groups[key]) for key in order]


def reduce_chain(T: PolyhedralChain) -> PolyhedralChain:
    """Interior-disjoint normal form via exact per-hull overlay (rational, k <= 3)."""
    if T.k == 0 or T.is_empty:
        return T
    if not T.is_rational:
        raise ReductionUnsupportedError("overlay reduction requires rational vertices")
    if T.k > 3:
        raise ReductionUnsupportedError("overlay reduction implemented for degree <= 3")
    out = []
    for key, members in _group_by_hull(T.terms):
        local = []
        for a, s in members:
            pts = tuple(_hull_coords(v, key) for v in s.vertices)
            sign = 1 if _overlay.simplex_det(pts) > 0 else -1
            local.append((Fraction(a) * sign, pts))
        for density, piece in _overlay.overlay(local):
            sign = 1 if _overlay.simplex_det(piece) > 0 else -1
            verts = tuple(_hull_point(c, key) for c in piece)
            out.append((density * sign, OrientedSimplex(verts)))
    return PolyhedralChain.from_terms(T.n, T.k, out)


def is_reduced(T: PolyhedralChain) -> bool:
    """True when no two simplices share interior points (exact test, rational only)."""
    if T.k == 0 or T.is_empty or not T.is_rational:
        return True
    for key, members in _group_by_hull(T.terms):
        if len(members) < 2:
            continue
        pts = [tuple(_hull_coords(v, key) for v in s.vertices) for _, s in members]
        if _overlay.has_overlap(pts):
            return False
    return True


def _ensure_reduced(T: PolyhedralChain) -> PolyhedralChain:
    if T.k == 0 or T.is_empty or not T.is_rational:
        return T
    if T.k > 3:
        # cannot decide overlap exactly beyond the supported overlay degree
        for key, members in _group_by_hull(T.terms):
            if len(members) > 1:
                raise ReductionUnsupportedError(
                    "possibly overlapping chain of degree > 3; reduce unsupported"
                )
        return T
    return T if is_reduced(T) else reduce_chain(T)


# -- cube chains -----------------------------------------------------------------


def unit_cube_chain(p: LinearMap) -> PolyhedralChain:
    """Image of the Kuhn-triangulated unit k-cube under the adjoint of a projection.

    All k! simplices are oriented coherently, so the Gaussian image is one
    atom of weight one at the image plane and the mass is exactly one.
    """
    k, n = p.rows, p.cols
    if k < 1:
        raise ValueError("cube chain needs degree at least 1")
    if not _is_orthogonal_projection(p):
        raise ValueError("map is not an orthogonal projection onto R^k")
    pstar = p.transpose()
    vertex_cache: dict[tuple[int, ...], tuple] = {}

    def push(lattice: tuple[int, ...]):
        if lattice not in vertex_cache:
            if pstar.is_rational:
                vec = tuple(
                    sum((Fraction(row[j]) * lattice[j] for j in range(k)), Fraction(0))
                    for row in pstar.entries
                )
            else:
                vec = tuple(
                    math.fsum(float(row[j]) * lattice[j] for j in range(k))
                    for row in pstar.entries
                )
            vertex_cache[lattice] = vec
        return vertex_cache[lattice]

    terms = []
    for perm in permutations(range(k)):
        lattice = [0] * k
        verts = [push(tuple(lattice))]
        for j in perm:
            lattice[j] += 1
            verts.append(push(tuple(lattice)))
        inversions = sum(
            1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j]
        )
        if inversions % 2:
            verts[-1], verts[-2] = verts[-2], verts[-1]
        terms.append((Fraction(1), OrientedSimplex(tuple(verts))))
    return PolyhedralChain.from_terms(n, k, terms)


def _is_orthogonal_projection(p: LinearMap, tol: float = 1e-10) -> bool:
    if p.rows > p.cols:
        return False
    return p.transpose().is_orthogonal_injection(tol)


def barycentric_subdivision(T: PolyhedralChain) -> PolyhedralChain:
    """Refine every simplex into (k+1)! interior-disjoint pieces of equal orientation."""
    out = []
    for a, s in T.terms:
        verts = s.vertices
        exact = s.is_rational
        for perm in permutations(range(len(verts))):
            pts = []
            for depth in range(1, len(verts) + 1):
                chosen = [verts[perm[i]] for i in range(depth)]
                if exact:
                    pt = tuple(
                        sum((Fraction(v[c]) for v in chosen), Fraction(0)) / depth
                        for c in range(len(verts[0]))
                    )
                else:
                    pt = tuple(
                        math.fsum(float(v[c]) for v in chosen) / depth
                        for c in range(len(verts[0]))
                    )
                pts.append(pt)
            try:
                piece = OrientedSimplex(tuple(pts))
            except DegeneracyError:
                continue
            sign = _same_direction_sign(piece, s)
            out.append((a * Fraction(1) * sign if is_exact(a) else float(a) * sign, piece))
    return PolyhedralChain.from_terms(T.n, T.k, out)


def _same_direction_sign(piece: OrientedSimplex, parent: OrientedSimplex) -> int:
    if piece.is_rational and parent.is_rational:
        from .exterior import inner

        val = inner(piece.edge_wedge, parent.edge_wedge)
    else:
        val = float(np.dot(piece.tau.dense(), parent.tau.dense()))
    return 1 if val > 0 else -1


# -- boundary comparison ------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryComparison:
    equal: bool
    exact: bool
    method: str
    detail: str = ""


def boundary_equal(
    A: PolyhedralChain,
    B: PolyhedralChain,
    n_forms: int = N_FORMS,
    degree: int = FORM_DEGREE,
    seed: int = 0,
    tau: float = TAU_FORM,
) -> BoundaryComparison:
    """Decide whether the two chains share a boundary.

    Exact path: the merged difference of boundaries cancels, or the per-hull
    overlay of the difference has zero density everywhere (degrees k-1 <= 2
    with rational data).  Otherwise the difference is evaluated against
    seeded random polynomial differential forms and 'probably equal' is
    reported with the randomized flag.
    """
    if (A.n, A.k) != (B.n, B.k):
        raise ValueError("chains must share (n, k)")
    if A.k == 0:
        return BoundaryComparison(False, True, "degenerate", "degree-0 chains have no boundary")
    diff = boundary(A) - boundary(B)
    if diff.is_empty:
        return BoundaryComparison(True, True, "merge")
    if diff.is_rational and diff.k <= 2:
        reduced = reduce_chain(diff)
        return BoundaryComparison(reduced.is_empty, True, "overlay")
    rng = np.random.default_rng(seed)
    forms = [_random_form(rng, A.n, A.k - 1, degree) for _ in range(n_forms)]
    worst = 0.0
    scale = 1.0
    for form in forms:
        va = _evaluate_form(boundary(A), form)
        vb = _evaluate_form(boundary(B), form)
        worst = max(worst, abs(va - vb))
        scale = max(scale, abs(va), abs(vb))
    equal = worst <= tau * scale
    return BoundaryComparison(equal, False, "randomized",
                              f"max residual {worst:.3e} at scale {scale:.3e}")


def _random_form(rng, n: int, m: int, degree: int):
    """Polynomial m-form: per basis direction, a dense polynomial of bounded degree."""
    monos = _monomials(n, degree)
    return {
        idx: {mono: float(c) for mono, c in zip(monos, rng.uniform(-1.0, 1.0, len(monos)))}
        for idx in basis_indices(n, m)
    }


def _monomials(n: int, degree: int):
    out = [(0,) * n]
    frontier = [(0,) * n]
    for _ in range(degree):
        nxt = []
        for mono in frontier:
            for i in range(n):
                cand = tuple(c + (1 if j == i else 0) for j, c in enumerate(mono))
                nxt.append(cand)
        frontier = sorted(set(nxt))
        out.extend(frontier)
    return sorted(set(out))


def _evaluate_form(T: PolyhedralChain, form) -> float:
    """Integral of the form over the chain; norms cancel against the Jacobian."""
    total = 0.0
    for a, s in T.terms:
        w = s.edge_wedge
        base = [float(x) for x in s.vertices[0]]
        cols = [
            [float(x) - b for x, b in zip(v, s.vertices[0])] for v in s.vertices[1:]
        ]
        for idx, c in w.coords.items():
            poly = form.get(idx)
            if not poly:
                continue
            contrib = _integrate_poly(poly, base, cols, s.k)
            total += float(a) * float(c) * contrib
    return total


def _integrate_poly(poly, base, cols, d: int) -> float:
    """Integral over the unit parameter simplex of the pulled-back polynomial."""
    total = 0.0
    for mono, coeff in poly.items():
        if coeff == 0.0:
            continue
        expanded = {(0,) * d: 1.0}
        for var, power in enumerate(mono):
            for _ in range(power):
                lin = {(0,) * d: base[var]}
                for j in range(d):
                    key = tuple(1 if jj == j else 0 for jj in range(d))
                    lin[key] = cols[j][var]
                expanded = _poly_mul(expanded, lin)
        for exps, c in expanded.items():
            if c == 0.0:
                continue
            num = 1.0
            for e in exps:
                num *= math.factorial(e)
            total += coeff * c * num / math.factorial(sum(exps) + d)
    return total


def _poly_mul(p, q):
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            key = tuple(a + b for a, b in zip(e1, e2))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


# -- ellipticity instances ------------------------------------------------------------


@dataclass(frozen=True)
class EllipticityReport:
    lhs: float
    rhs: float
    margin: float
    holds: bool
    degenerate: bool
    boundary_check: BoundaryComparison


def check_ellipticity_instance(
    F: Integrand, c: float, S: PolyhedralChain, D: PolyhedralChain
) -> EllipticityReport:
    """Energy excess of S over the flat cube image D versus c times the mass excess.

    The degenerate pair S = D (strict inequality unsatisfiable) is flagged
    rather than rejected.
    """
    check = boundary_equal(S, D)
    if not check.equal:
        raise TestPairError("chains do not share a boundary")
    gd = gaussian_measure(D)
    if len(gd.atoms) != 1 or abs(float(gd.atoms[0][0]) - 1.0) > 1e-9:
        raise TestPairError("reference chain is not a unit cube image")
    degenerate = S.terms == D.terms
    lhs = energy(F, S) - energy(F, D)
    rhs = float(c) * (mass(S) - mass(D))
    margin = lhs - rhs
    return EllipticityReport(lhs, rhs, margin, margin > 0, degenerate, check)
