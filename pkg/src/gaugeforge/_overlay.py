"""Exact overlay of rational simplices sharing an affine hull.

Works in hull coordinates: d-simplices with Fraction vertices in Q^d.  Every
simplex is split by every facet hyperplane of every other simplex; the
resulting pieces are grouped into arrangement cells by the sign vector of
their centroids, each cell's net density is read off by exact point-in-simplex
tests against the originals, and one parent's pieces triangulate each cell.
"""

from __future__ import annotations

from fractions import Fraction

from . import _rat
from .errors import ConsistencyError

Point = tuple[Fraction, ...]
Simplex = tuple[Point, ...]
Hyperplane = tuple[tuple[Fraction, ...], Fraction]


def edges(pts: Simplex) -> list[Point]:
    return [_rat.sub(p, pts[0]) for p in pts[1:]]


def simplex_det(pts: Simplex) -> Fraction:
    return _rat.det(edges(pts))


def centroid(pts: Simplex) -> Point:
    m = Fraction(1, len(pts))
    return tuple(sum(coords, Fraction(0)) * m for coords in zip(*pts))


def canonical_hyperplane(normal, offset) -> Hyperplane:
    lead = next(x for x in normal if x != 0)
    inv = Fraction(1) / lead
    return tuple(x * inv for x in normal), offset * inv


def facet_hyperplanes(pts: Simplex) -> list[Hyperplane]:
    d = len(pts) - 1
    out = []
    for drop in range(d + 1):
        facet = [p for i, p in enumerate(pts) if i != drop]
        if d == 1:
            normal: tuple = (Fraction(1),)
            offset = facet[0][0]
        else:
            dirs = [_rat.sub(p, facet[0]) for p in facet[1:]]
            ns = _rat.nullspace(dirs, d)
            if len(ns) != 1:
                raise ConsistencyError("degenerate facet in overlay")
            normal = ns[0]
            offset = _rat.dot(normal, facet[0])
        out.append(canonical_hyperplane(normal, offset))
    return out


def _side(hp: Hyperplane, p: Point) -> int:
    v = _rat.dot(hp[0], p) - hp[1]
    return (v > 0) - (v < 0)


def split_simplex(pts: Simplex, hp: Hyperplane) -> list[Simplex]:
    """Pieces of a simplex after cutting along a hyperplane, exactly.

    Repeatedly splits a crossing edge at its intersection point; children
    keep the parent's orientation (their edge determinants are positive
    multiples of the parent's).
    """
    sides = [_side(hp, p) for p in pts]
    cross = next(
        (
            (i, j)
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
            if sides[i] * sides[j] < 0
        ),
        None,
    )
    if cross is None:
        return [pts]
    i, j = cross
    a = _rat.dot(hp[0], pts[i]) - hp[1]
    b = _rat.dot(hp[0], pts[j]) - hp[1]
    t = a / (a - b)
    x = tuple(p + t * (q - p) for p, q in zip(pts[i], pts[j]))
    child1 = tuple(x if idx == j else p for idx, p in enumerate(pts))
    child2 = tuple(x if idx == i else p for idx, p in enumerate(pts))
    return split_simplex(child1, hp) + split_simplex(child2, hp)


def point_in_closed_simplex(pts: Simplex, x: Point) -> bool:
    d = len(x)
    cols = edges(pts)
    rows = [tuple(col[i] for col in cols) for i in range(d)]
    lam = _rat.solve(rows, _rat.sub(x, pts[0]))
    if lam is None:
        raise ConsistencyError("degenerate simplex in containment test")
    return all(l >= 0 for l in lam) and sum(lam) <= 1


def overlay(terms: list[tuple[Fraction, Simplex]]) -> list[tuple[Fraction, Simplex]]:
    """Interior-disjoint retriangulation with net densities.

    ``terms`` carry signed coefficients relative to a fixed hull orientation.
    Returns (density, piece) pairs with nonzero densities; pieces of distinct
    cells are disjoint and pieces within a cell come from a single parent.
    """
    hps: list[Hyperplane] = []
    seen = set()
    for _, pts in terms:
        for hp in facet_hyperplanes(pts):
            if hp not in seen:
                seen.add(hp)
                hps.append(hp)

    cells: dict[tuple[int, ...], dict] = {}
    for parent, (_, pts) in enumerate(terms):
        pieces = [pts]
        for hp in hps:
            pieces = [piece for chunk in pieces for piece in split_simplex(chunk, hp)]
        for piece in pieces:
            c = centroid(piece)
            key = tuple(_side(hp, c) for hp in hps)
            if any(s == 0 for s in key):
                raise ConsistencyError("cell representative landed on a hyperplane")
            cell = cells.get(key)
            if cell is None:
                density = sum(
                    (cf for cf, spts in terms if point_in_closed_simplex(spts, c)),
                    Fraction(0),
                )
                cells[key] = {"density": density, "parent": parent, "pieces": [piece]}
            elif cell["parent"] == parent:
                cell["pieces"].append(piece)

    out = []
    for cell in cells.values():
        if cell["density"] != 0:
            out.extend((cell["density"], piece) for piece in cell["pieces"])
    return out


def has_overlap(simplices: list[Simplex]) -> bool:
    """True when two of the simplices share an interior point."""
    hps: list[Hyperplane] = []
    seen = set()
    for pts in simplices:
        for hp in facet_hyperplanes(pts):
            if hp not in seen:
                seen.add(hp)
                hps.append(hp)
    for idx, pts in enumerate(simplices):
        pieces = [pts]
        for hp in hps:
            pieces = [piece for chunk in pieces for piece in split_simplex(chunk, hp)]
        for piece in pieces:
            c = centroid(piece)
            covering = sum(1 for spts in simplices if point_in_closed_simplex(spts, c))
            if covering >= 2:
                return True
    return False
