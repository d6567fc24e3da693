"""Uniform polyconvexity: certify the defining inequality and search for violations.

A decomposition writes a unit simple k-vector as a positive combination of
unit simple k-vectors.  An integrand is uniformly polyconvex with constant c
when the excess cost of every decomposition dominates c times its excess
mass; ``certify_upc_instance`` checks one decomposition, and
``search_upc_violation`` hunts for counterexamples with a mass-capped LP
over sampled atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linprog
from ._util import parallel_map
from .errors import DecompositionError
from .exterior import GrassmannPoint, KVector, basis_indices, is_exact
from .integrands import GrassmannSample, Integrand, evaluate

TAU_DEC = 1e-10
MASS_CAP = 8.0
DEFAULT_RESTARTS = 64
DEFAULT_ATOMS = 256


@dataclass(frozen=True)
class Decomposition:
    """eta0 written as sum of m_i * eta_i with positive weights."""

    eta0: GrassmannPoint
    atoms: tuple[tuple[float | Fraction, GrassmannPoint], ...]

    def __post_init__(self):
        if not self.atoms:
            raise DecompositionError("decomposition needs at least one atom")
        if any(m <= 0 for m, _ in self.atoms):
            raise DecompositionError("weights must be strictly positive")

    @property
    def d(self) -> int:
        return len(self.atoms)

    @property
    def total_mass(self) -> float:
        return float(sum(float(m) for m, _ in self.atoms))

    @property
    def is_exact(self) -> bool:
        return (
            self.eta0.exact_vec is not None
            and all(is_exact(m) and p.exact_vec is not None for m, p in self.atoms)
        )

    def residual_vector(self) -> KVector:
        if self.is_exact:
            out = self.eta0.exact_vec
            for m, p in self.atoms:
                out = out - Fraction(m) * p.exact_vec
            return out
        out = self.eta0.vec
        for m, p in self.atoms:
            out = out - float(m) * p.vec
        return out

    def residual(self) -> float:
        return self.residual_vector().norm()

    def validate(self, tau: float = TAU_DEC) -> None:
        res = self.residual()
        bound = 0.0 if self.is_exact else tau
        if res > bound:
            raise DecompositionError(
                f"barycenter identity fails with residual {res}", residual=res
            )

    def merged(self, tau_atom: float = 1e-12) -> "Decomposition":
        """Sum weights of coinciding atoms (within tau_atom in the float kingdom)."""
        kept: list[list] = []
        for m, p in self.atoms:
            hit = None
            for slot in kept:
                if float((slot[1].vec - p.vec).norm()) <= tau_atom:
                    hit = slot
                    break
            if hit is None:
                kept.append([m, p])
            else:
                hit[0] = hit[0] + m
        return Decomposition(self.eta0, tuple((m, p) for m, p in kept))


@dataclass(frozen=True)
class UPCVerdict:
    """Outcome of one instance of the uniform polyconvexity inequality."""

    c: float
    lhs: float | Fraction
    rhs: float | Fraction
    margin: float | Fraction
    holds: bool
    exact: bool

    def as_floats(self):
        return float(self.lhs), float(self.rhs), float(self.margin)


def certify_upc_instance(
    F: Integrand,
    c: float | Fraction,
    dec: Decomposition,
    tau_dec: float = TAU_DEC,
    tau_margin: float | None = None,
) -> UPCVerdict:
    """Check sum m_i F(eta_i) - F(eta0) >= c (sum m_i - 1) on one decomposition.

    All |eta_i| are one, so the right side collapses to c (sum m_i - 1).
    Exact arithmetic is used when the weights, atoms, and integrand are all
    rational; otherwise floating with a scale-aware margin tolerance.
    """
    dec.validate(tau_dec)
    if dec.is_exact and is_exact(c):
        f0 = F.evaluate_exact(dec.eta0.exact_vec)
        fis = [F.evaluate_exact(p.exact_vec) for _, p in dec.atoms]
        if f0 is not None and all(v is not None for v in fis):
            lhs = sum((Fraction(m) * v for (m, _), v in zip(dec.atoms, fis)), Fraction(0)) - f0
            rhs = Fraction(c) * (sum((Fraction(m) for m, _ in dec.atoms), Fraction(0)) - 1)
            margin = lhs - rhs
            return UPCVerdict(float(c), lhs, rhs, margin, margin >= 0, exact=True)
    lhs = math.fsum(float(m) * evaluate(F, p) for m, p in dec.atoms) - evaluate(F, dec.eta0)
    rhs = float(c) * (math.fsum(float(m) for m, _ in dec.atoms) - 1.0)
    margin = lhs - rhs
    tol = tau_margin if tau_margin is not None else 1e-9 * (1.0 + abs(lhs))
    return UPCVerdict(float(c), lhs, rhs, margin, margin >= -tol, exact=False)


PENCIL_ANGLES = tuple(0.15 + 0.2 * i for i in range(7))


def _pencil_atoms(frame, comp) -> list[GrassmannPoint]:
    """Rotate one frame row toward one normal direction by a grid of angles.

    Pairs of such atoms average back to a multiple of the base plane, so they
    are exactly the geometry cheap decompositions are made of.
    """
    out = []
    for j in range(len(frame)):
        for u in comp:
            for theta in PENCIL_ANGLES:
                cos_t, sin_t = math.cos(theta), math.sin(theta)
                for sign in (1.0, -1.0):
                    rows = list(frame)
                    rows[j] = tuple(
                        cos_t * a + sign * sin_t * b for a, b in zip(frame[j], u)
                    )
                    out.append(GrassmannPoint.from_frame(rows))
    return out


@dataclass(frozen=True)
class SearchResult:
    decomposition: Decomposition | None
    verdict: UPCVerdict | None
    margin: float
    restart: int
    violation_found: bool


def search_upc_violation(
    F: Integrand,
    c: float,
    n: int,
    k: int,
    budget: int = DEFAULT_RESTARTS,
    seed: int = 0,
    atoms_per_restart: int = DEFAULT_ATOMS,
    mass_cap: float = MASS_CAP,
) -> SearchResult:
    """Randomized multi-start hunt for the most negative UPC margin.

    Each restart samples a base point and solves the hull-style LP with the
    objective rearranged to sum m_i (F(eta_i) - c), under the barycenter
    constraint and a total-mass cap (without the cap the margin is unbounded
    below whenever c exceeds the cheapest antipodal average).  Deterministic
    given the seed; ties broken by restart index.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    dim = len(basis_indices(n, k))

    def one(restart: int):
        rng = np.random.default_rng(seed * 7919 + restart)
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
        frame = [tuple(float(x) for x in q[:, j]) for j in range(k)]
        comp = [tuple(float(x) for x in q[:, k + j]) for j in range(n - k)]
        eta0 = GrassmannPoint.from_frame(frame)
        structured = _pencil_atoms(frame, comp)
        sample = GrassmannSample.generate(
            n,
            k,
            atoms_per_restart,
            seed=seed * 7919 + restart,
            scheme="antipodal-closed",
            include=[eta0] + structured,
        )
        values = sample.values(F)
        cost = np.append(values - c, 0.0)  # slack column for the mass cap
        A = np.vstack([sample.matrix, np.ones(len(sample.points))])
        A = np.hstack([A, np.zeros((dim + 1, 1))])
        A[dim, -1] = 1.0
        b = np.append(eta0.dense(), mass_cap)
        res = linprog.solve_lp_float(cost.tolist(), A.tolist(), b.tolist())
        if res.status != "optimal":
            return None
        weights = [
            (res.x[j], sample.points[j])
            for j in range(len(sample.points))
            if res.x[j] > 0.0
        ]
        if not weights:
            return None
        dec = Decomposition(eta0, tuple(weights))
        try:
            verdict = certify_upc_instance(F, c, dec)
        except DecompositionError:
            return None
        return dec, verdict

    outcomes = parallel_map(one, range(budget))
    best = None
    for restart, out in enumerate(outcomes):
        if out is None:
            continue
        dec, verdict = out
        margin = float(verdict.margin)
        if best is None or margin < best[2]:
            best = (dec, verdict, margin, restart)
    if best is None:
        return SearchResult(None, None, math.inf, -1, False)
    dec, verdict, margin, restart = best
    return SearchResult(dec, verdict, margin, restart, not verdict.holds)
