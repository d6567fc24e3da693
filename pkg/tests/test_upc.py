"""Uniform polyconvexity certificates and the violation search."""

import math
from fractions import Fraction

import numpy as np
import pytest

from gaugeforge import GrassmannPoint
from gaugeforge.errors import DecompositionError
from gaugeforge.integrands import Integrand
from gaugeforge.upc import Decomposition, certify_upc_instance, search_upc_violation

SQRT2 = math.sqrt(2.0)
OMEGA = GrassmannPoint.basis_point(4, (1, 2))


def vpm_decomposition():
    """e1^e2 = (1/sqrt2) e1^v+ + (1/sqrt2) e1^v- with v± = (e2 ± e3)/sqrt2."""
    eta0 = GrassmannPoint.basis_point(4, (1, 2))
    plus = GrassmannPoint.from_frame([(1.0, 0, 0, 0), (0, 1 / SQRT2, 1 / SQRT2, 0)])
    minus = GrassmannPoint.from_frame([(1.0, 0, 0, 0), (0, 1 / SQRT2, -1 / SQRT2, 0)])
    return Decomposition(eta0, ((1 / SQRT2, plus), (1 / SQRT2, minus)))


def test_vpm_decomposition_is_valid():
    dec = vpm_decomposition()
    dec.validate()
    assert dec.residual() <= 1e-15


def test_vpm_margin_zero_at_c_one():
    # direct wedge computation: lhs = sqrt2 - 1 = rhs, margin exactly 0 in floats
    v = certify_upc_instance(Integrand.area(), 1.0, vpm_decomposition())
    assert v.lhs == pytest.approx(SQRT2 - 1.0, abs=1e-15)
    assert v.margin == 0.0
    assert v.holds


def test_vpm_violated_at_c_1_2():
    v = certify_upc_instance(Integrand.area(), 1.2, vpm_decomposition())
    expected = (SQRT2 - 1.0) * (1.0 - 1.2)
    assert v.margin == pytest.approx(expected, abs=1e-12)
    assert not v.holds


def test_identity_decomposition_margin_zero():
    eta0 = GrassmannPoint.basis_point(4, (1, 3))
    dec = Decomposition(eta0, ((1.0, eta0),))
    for F in (Integrand.area(), Integrand.linear_dip(0.5, OMEGA)):
        for c in (0.5, 1.0, 2.0):
            v = certify_upc_instance(F, c, dec)
            assert v.margin == 0.0 and v.holds


def test_exact_kingdom_certificate():
    eta0 = GrassmannPoint.basis_point(4, (1, 2))
    dec = Decomposition(
        eta0,
        ((Fraction(1, 2), eta0), (Fraction(1, 2), eta0)),
    )
    v = certify_upc_instance(Integrand.area(), Fraction(1), dec)
    assert v.exact
    assert v.margin == 0


def test_invalid_decomposition_raises_with_residual():
    eta0 = GrassmannPoint.basis_point(4, (1, 2))
    other = GrassmannPoint.basis_point(4, (3, 4))
    dec = Decomposition(eta0, ((1.0, other),))
    with pytest.raises(DecompositionError) as err:
        certify_upc_instance(Integrand.area(), 1.0, dec)
    assert err.value.residual == pytest.approx(SQRT2)


def test_certify_invariant_under_permutation_and_merge():
    dec = vpm_decomposition()
    swapped = Decomposition(dec.eta0, dec.atoms[::-1])
    split = Decomposition(
        dec.eta0,
        (
            (0.5 / SQRT2, dec.atoms[0][1]),
            (1 / SQRT2, dec.atoms[1][1]),
            (0.5 / SQRT2, dec.atoms[0][1]),
        ),
    )
    F = Integrand.linear_dip(0.3, OMEGA)
    base = certify_upc_instance(F, 0.8, dec)
    assert certify_upc_instance(F, 0.8, swapped).margin == pytest.approx(base.margin, abs=1e-12)
    assert certify_upc_instance(F, 0.8, split.merged()).margin == pytest.approx(base.margin, abs=1e-12)


def test_margin_monotone_in_c():
    dec = vpm_decomposition()
    F = Integrand.area()
    margins = [certify_upc_instance(F, c, dec).margin for c in (0.25, 0.5, 1.0, 1.5, 2.0)]
    assert all(a >= b - 1e-15 for a, b in zip(margins, margins[1:]))
    # once violated, stays violated for larger c (total mass exceeds one)
    holds = [certify_upc_instance(F, c, dec).holds for c in (0.5, 1.0, 1.1, 1.5)]
    assert holds == [True, True, False, False]


# -- search --------------------------------------------------------------------


def test_search_area_c1_no_violation():
    res = search_upc_violation(Integrand.area(), 1.0, 4, 2, budget=12, seed=0)
    assert not res.violation_found
    assert res.margin >= -1e-7


def test_search_area_c12_finds_violation():
    res = search_upc_violation(Integrand.area(), 1.2, 4, 2, budget=8, seed=1)
    assert res.violation_found
    # at least as violating as the v± pattern at this level
    assert res.margin <= (SQRT2 - 1.0) * (1.0 - 1.2) + 1e-9
    res.decomposition.validate()


def test_search_dip_c_half_finds_violation():
    F = Integrand.linear_dip(0.9, OMEGA)
    res = search_upc_violation(F, 0.5, 4, 2, budget=8, seed=2)
    assert res.violation_found
    assert res.margin < 0
    v = certify_upc_instance(F, 0.5, res.decomposition)
    assert not v.holds


def test_search_deterministic_given_seed():
    F = Integrand.linear_dip(0.6, OMEGA)
    r1 = search_upc_violation(F, 0.8, 4, 2, budget=6, seed=5)
    r2 = search_upc_violation(F, 0.8, 4, 2, budget=6, seed=5)
    assert r1.margin == r2.margin and r1.restart == r2.restart


def test_search_rejects_bad_budget():
    with pytest.raises(ValueError):
        search_upc_violation(Integrand.area(), 1.0, 4, 2, budget=0)
