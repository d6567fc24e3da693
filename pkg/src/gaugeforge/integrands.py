"""Geometric integrands on the oriented Grassmannian.

An integrand is a positive continuous function on unit simple k-vectors,
carried with a Lipschitz bound and a sup bound.  This module evaluates the
builtin families, extends them off the Grassmannian by inf-convolution,
discretizes the convex positively homogeneous hull as a linear program over
a sample of planes, and reports polyconvexity gaps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linprog
from ._util import parallel_map
from .errors import ConfigurationError, FeasibilityError, IntegrandError
from .exterior import GrassmannPoint, KVector, basis_indices, inner, is_exact

TABULATED_FLOOR = 1e-9
DEFAULT_GAP_TOL_FACTOR = 1e-6


@dataclass(frozen=True)
class Integrand:
    """Positive continuous function on the oriented Grassmannian.

    Kinds: ``area`` is constantly one; ``linear_dip(a, omega)`` is
    1 + a*(1 - |<xi, omega>|) for a > -1, dipping to 1 at +-omega when a > 0;
    ``tabulated`` carries explicit atom/value pairs; ``composite`` is a
    positive base weight plus a sum of dip terms.
    """

    kind: str
    params: dict = field(default_factory=dict)
    lip: float = 0.0
    sup: float = 1.0

    # -- constructors --------------------------------------------------------

    @staticmethod
    def area() -> "Integrand":
        return Integrand("area", {}, lip=0.0, sup=1.0)

    @staticmethod
    def linear_dip(a: float, omega: GrassmannPoint) -> "Integrand":
        if not a > -1.0:
            raise IntegrandError("dip amplitude must exceed -1 to keep the integrand positive")
        return Integrand(
            "linear_dip",
            {"a": a, "omega": omega},
            lip=abs(a),
            sup=1.0 + max(a, 0.0),
        )

    @staticmethod
    def tabulated(atoms, values, lip: float | None = None) -> "Integrand":
        atoms = tuple(atoms)
        values = tuple(float(v) for v in values)
        if len(atoms) != len(values) or not atoms:
            raise IntegrandError("tabulated integrand needs matching nonempty atoms/values")
        clipped = []
        for v in values:
            if v < TABULATED_FLOOR:
                warnings.warn("tabulated value clipped to the positivity floor", stacklevel=2)
                v = TABULATED_FLOOR
            clipped.append(v)
        est = lip if lip is not None else _estimate_lipschitz(atoms, clipped)
        return Integrand(
            "tabulated",
            {"atoms": atoms, "values": tuple(clipped)},
            lip=float(est),
            sup=max(clipped),
        )

    @staticmethod
    def composite(base: float, dips) -> "Integrand":
        dips = tuple((float(a), omega) for a, omega in dips)
        low = base + sum(min(a, 0.0) for a, _ in dips)
        if low <= 0:
            raise IntegrandError("composite integrand is nonpositive somewhere")
        return Integrand(
            "composite",
            {"base": float(base), "dips": dips},
            lip=sum(abs(a) for a, _ in dips),
            sup=base + sum(max(a, 0.0) for a, _ in dips),
        )

    # -- evaluation ------------------------------------------------------------

    def __call__(self, xi: GrassmannPoint) -> float:
        return evaluate(self, xi)

    def evaluate_exact(self, vec: KVector) -> Fraction | None:
        """Exact value at an exactly rational unit simple vector, when possible."""
        if not vec.is_rational:
            return None
        if self.kind == "area":
            return Fraction(1)
        if self.kind == "linear_dip":
            a, omega = self.params["a"], self.params["omega"]
            if omega.exact_vec is None or not is_exact(a):
                return None
            return Fraction(1) + Fraction(a) * (1 - abs(inner(vec, omega.exact_vec)))
        return None


def _estimate_lipschitz(atoms, values) -> float:
    worst = 0.0
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            d = float((atoms[i].vec - atoms[j].vec).norm())
            if d > 1e-12:
                worst = max(worst, abs(values[i] - values[j]) / d)
    return worst * 1.05


def evaluate(F: Integrand, xi: GrassmannPoint) -> float:
    """Evaluate the integrand; nonpositive results raise."""
    if F.kind == "area":
        return 1.0
    if F.kind == "linear_dip":
        a, omega = F.params["a"], F.params["omega"]
        value = 1.0 + float(a) * (1.0 - abs(xi.inner(omega)))
    elif F.kind == "composite":
        value = F.params["base"]
        for a, omega in F.params["dips"]:
            value += a * (1.0 - abs(xi.inner(omega)))
    elif F.kind == "tabulated":
        value = _evaluate_tabulated(F, xi)
    else:
        raise IntegrandError(f"unknown integrand kind {F.kind!r}")
    if value <= 0.0:
        raise IntegrandError(f"integrand produced nonpositive value {value}")
    return value


def _evaluate_tabulated(F: Integrand, xi: GrassmannPoint) -> float:
    atoms = F.params["atoms"]
    values = F.params["values"]
    dists = [float((xi.vec - p.vec).norm()) for p in atoms]
    nearest = min(range(len(atoms)), key=lambda i: dists[i])
    if dists[nearest] <= 1e-9:
        return values[nearest]
    if F.lip > 0.0:
        return min(v + F.lip * d for v, d in zip(values, dists))
    raise IntegrandError("tabulated integrand queried off its atoms without a Lipschitz bound")


def lipschitz_extension(F: Integrand, x: KVector, sample: "GrassmannSample | None" = None) -> float:
    """Inf-convolution extension min_y F(y) + L |x - y| over a dense sample.

    Agrees with F on the Grassmannian up to L times the sample covering
    radius and is L-Lipschitz on all of the exterior power by construction.
    """
    if not math.isfinite(F.lip):
        raise ConfigurationError("integrand carries no finite Lipschitz bound")
    if sample is None:
        sample = GrassmannSample.generate(x.n, x.k, count=2048, seed=0)
    dense = x.dense()
    dists = np.linalg.norm(sample.matrix.T - dense, axis=1)
    values = sample.values(F)
    return float(np.min(values + F.lip * dists))


@dataclass(frozen=True)
class GrassmannSample:
    """Immutable batch of unit simple k-vectors used as hull atoms."""

    n: int
    k: int
    points: tuple[GrassmannPoint, ...]
    seed: int
    scheme: str

    @staticmethod
    def generate(
        n: int,
        k: int,
        count: int,
        seed: int = 0,
        scheme: str = "antipodal-closed",
        include=(),
    ) -> "GrassmannSample":
        """Uniform random frames via QR of Gaussian matrices.

        ``count`` is the total size; the antipodal-closed scheme fills half
        with fresh frames and appends their opposites.  ``include`` points are
        prepended verbatim (plus antipodes under the closed scheme).
        """
        if scheme not in ("uniform-frame", "antipodal-closed"):
            raise ValueError(f"unknown sampling scheme {scheme!r}")
        points = list(include)
        if scheme == "antipodal-closed":
            points.extend([-p for p in include])
        rng = np.random.default_rng(seed)
        want = max(count - len(points), 0)
        if scheme == "antipodal-closed":
            fresh = _random_points(rng, n, k, (want + 1) // 2)
            points.extend(fresh)
            points.extend([-p for p in fresh])
        else:
            points.extend(_random_points(rng, n, k, want))
        return GrassmannSample(n, k, tuple(points), seed, scheme)

    def refined(self, extra: int, seed_offset: int = 1) -> "GrassmannSample":
        """Superset sample: previous atoms plus ``extra`` fresh ones."""
        rng = np.random.default_rng(self.seed + seed_offset)
        fresh = _random_points(rng, self.n, self.k, extra // 2 if self.scheme == "antipodal-closed" else extra)
        points = list(self.points) + fresh
        if self.scheme == "antipodal-closed":
            points.extend([-p for p in fresh])
        return GrassmannSample(self.n, self.k, tuple(points), self.seed, self.scheme)

    @property
    def matrix(self) -> np.ndarray:
        """Columns are dense coordinates of the atoms."""
        cached = getattr(self, "_matrix", None)
        if cached is None:
            cached = np.array([p.dense() for p in self.points]).T
            object.__setattr__(self, "_matrix", cached)
        return cached

    def values(self, F: Integrand) -> np.ndarray:
        return np.array([evaluate(F, p) for p in self.points])


def _random_points(rng, n: int, k: int, count: int) -> list[GrassmannPoint]:
    if count <= 0:
        return []
    mats = rng.standard_normal((count, n, k))
    qs, rs = np.linalg.qr(mats)
    signs = np.sign(np.einsum("bii->bi", rs))
    signs[signs == 0] = 1.0
    qs = qs * signs[:, None, :]
    idxs = [np.array(idx.entries) - 1 for idx in basis_indices(n, k)]
    out = []
    for q in qs:
        sub = np.stack([q[rows, :] for rows in idxs])
        coords = np.linalg.det(sub)
        coords /= np.linalg.norm(coords)
        vec = KVector.from_dense(n, k, [float(x) for x in coords])
        out.append(GrassmannPoint(vec))
    return out


@dataclass(frozen=True)
class HullResult:
    """Optimal discretized hull value and its decomposition."""

    value: float | Fraction
    weights: tuple[tuple[float | Fraction, GrassmannPoint], ...]
    exact: bool

    @property
    def total_mass(self):
        return sum(w for w, _ in self.weights)


def conv_hull_value(F: Integrand, xi: KVector, sample: GrassmannSample) -> HullResult:
    """Cheapest discrete measure over the sample atoms with barycenter xi.

    Linear program: minimize sum m_i F(eta_i) subject to sum m_i eta_i = xi,
    m >= 0.  A vertex solution uses at most dim-many atoms, so the reported
    support automatically satisfies the cone Caratheodory bound.
    """
    if not sample.points:
        raise FeasibilityError("empty sample")
    exact_atoms = all(p.exact_vec is not None for p in sample.points)
    exact_vals = [F.evaluate_exact(p.exact_vec) if p.exact_vec is not None else None
                  for p in sample.points]
    if exact_atoms and xi.is_rational and all(v is not None for v in exact_vals):
        order = basis_indices(sample.n, sample.k)
        A = [[p.exact_vec.coordinate(idx) for p in sample.points] for idx in order]
        b = [xi.coordinate(idx) for idx in order]
        res = linprog.require_optimal(linprog.solve_lp_exact(exact_vals, A, b), "hull")
        weights = tuple((res.x[j], sample.points[j]) for j in res.support)
        return HullResult(res.value, weights, exact=True)
    c = sample.values(F).tolist()
    A = sample.matrix.tolist()
    b = xi.dense().tolist()
    res = linprog.require_optimal(linprog.solve_lp_float(c, A, b), "hull")
    weights = tuple((res.x[j], sample.points[j]) for j in res.support)
    return HullResult(float(res.value), weights, exact=False)


@dataclass(frozen=True)
class GapWitness:
    point: GrassmannPoint
    gap: float
    hull_value: float
    decomposition: tuple[tuple[float, GrassmannPoint], ...]


@dataclass(frozen=True)
class PolyconvexReport:
    max_gap: float
    witness: GapWitness | None
    tol: float
    gaps: tuple[float, ...]

    @property
    def violation_found(self) -> bool:
        return self.max_gap > self.tol


def is_polyconvex_report(F: Integrand, sample: GrassmannSample, tol: float | None = None) -> PolyconvexReport:
    """Hull-vs-value gaps at every sampled plane; a positive gap is a violation.

    The gap at an atom can never be meaningfully negative (the single-atom
    measure is feasible), which is asserted up to the LP tolerance.
    """
    def one(point: GrassmannPoint):
        hull = conv_hull_value(F, point.vec, sample)
        return point, float(F(point)) - float(hull.value), hull

    results = parallel_map(one, sample.points)
    max_gap = -math.inf
    witness = None
    gaps = []
    for point, gap, hull in results:
        bound = tol if tol is not None else DEFAULT_GAP_TOL_FACTOR * float(F(point))
        if gap < -max(bound, 1e-7):
            raise FeasibilityError("hull exceeded the integrand at a sample atom beyond tolerance")
        gaps.append(gap)
        if gap > max_gap:
            max_gap = gap
            witness = GapWitness(point, gap, float(hull.value),
                                 tuple((float(w), p) for w, p in hull.weights))
    used_tol = tol if tol is not None else DEFAULT_GAP_TOL_FACTOR * (float(F(witness.point)) if witness else 1.0)
    return PolyconvexReport(max_gap, witness, used_tol, tuple(gaps))


def homogenization_nonconvexity_check(r: float, p: float, e: GrassmannPoint, step: float = 1e-3):
    """Second derivative along a sphere geodesic of the homogenized bump.

    h(x) = |x - r e|^p is convex, but its positively homogeneous rescaling f
    fails convexity at -e whenever p r exceeds (1+r)^2: both the closed form
    |x - r e|^(p-2) * ((1+r)^2 - p r) and a central finite difference of f
    along the geodesic through -e are returned.
    """
    if not r > 1.0:
        raise ValueError("radius parameter must exceed 1")
    threshold = (1.0 + r) ** 2 / r
    if p < threshold:
        raise ValueError(f"exponent must be at least (1+r)^2/r = {threshold}")
    e_vec = e.dense()
    dim = e_vec.shape[0]
    if dim < 2:
        raise ValueError("need at least two hull coordinates")
    u = None
    for i in range(dim):
        cand = np.zeros(dim)
        cand[i] = 1.0
        cand -= np.dot(cand, e_vec) * e_vec
        norm = np.linalg.norm(cand)
        if norm > 1e-8:
            u = cand / norm
            break
    x = -e_vec

    def h(y):
        return float(np.linalg.norm(y - r * e_vec) ** p)

    def f(y):
        nrm = float(np.linalg.norm(y))
        return nrm * h(y / nrm)

    def gamma(s):
        return math.cos(s) * x + math.sin(s) * u

    second = (f(gamma(step)) - 2.0 * f(gamma(0.0)) + f(gamma(-step))) / step**2
    fd_value = second + f(x)  # Euler relation: (f o gamma)'' = D^2 f uu - f(x)
    closed = (1.0 + r) ** (p - 2.0) * (-p * r + (1.0 + r) ** 2)
    return {
        "closed_form": closed,
        "finite_difference": fd_value,
        "relative_gap": abs(fd_value - closed) / max(abs(closed), 1.0),
    }
