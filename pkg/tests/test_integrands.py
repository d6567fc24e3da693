"""Integrand evaluation, hull LPs, gap reports, and the non-convexity demo."""

import math

import numpy as np
import pytest

from gaugeforge import GrassmannPoint, KVector
from gaugeforge.errors import ConfigurationError, IntegrandError
from gaugeforge.integrands import (
    GrassmannSample,
    Integrand,
    conv_hull_value,
    evaluate,
    homogenization_nonconvexity_check,
    is_polyconvex_report,
    lipschitz_extension,
)

OMEGA = GrassmannPoint.basis_point(4, (1, 2))
XI_PERP = GrassmannPoint.basis_point(4, (3, 4))


def dip_witness_atoms(a):
    """The two atoms realizing the hull value sqrt(1+2a) at e1^e3.

    Oracle derivation: on the circle eta(t) = e1^(cos t e2 + sin t e3) the
    two-atom cost (1 + a(1-cos t))/sin t is minimized at cos t = a/(1+a)
    with value sqrt(1+2a); a linear functional certifies this is optimal
    over the whole Grassmannian (checked numerically below).
    """
    c0 = a / (1 + a)
    s0 = math.sqrt(1 - c0 * c0)
    plus = GrassmannPoint.from_frame([(1.0, 0, 0, 0), (0.0, c0, s0, 0)])
    minus = GrassmannPoint.from_frame([(1.0, 0, 0, 0), (0.0, -c0, s0, 0)])
    return plus, minus


# -- evaluation ---------------------------------------------------------------


def test_area_is_one():
    F = Integrand.area()
    assert F(OMEGA) == 1.0
    assert F(XI_PERP) == 1.0


def test_linear_dip_values():
    F = Integrand.linear_dip(0.5, OMEGA)
    assert F(OMEGA) == pytest.approx(1.0)
    assert F(XI_PERP) == pytest.approx(1.5)


def test_linear_dip_amplitude_bound():
    with pytest.raises(IntegrandError):
        Integrand.linear_dip(-1.0, OMEGA)


def test_declared_lipschitz_never_exceeded():
    rng = np.random.default_rng(41)
    F = Integrand.linear_dip(0.7, OMEGA)
    pts = GrassmannSample.generate(4, 2, 40, seed=7).points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = float((pts[i].vec - pts[j].vec).norm())
            if d > 1e-9:
                assert abs(F(pts[i]) - F(pts[j])) <= F.lip * d + 1e-12


def test_tabulated_clips_at_floor():
    atoms = [OMEGA, XI_PERP]
    with pytest.warns(UserWarning):
        F = Integrand.tabulated(atoms, [1.0, -0.5], lip=1.0)
    assert F(XI_PERP) == pytest.approx(1e-9)


def test_composite_matches_sum_of_dips():
    F = Integrand.composite(1.0, [(0.25, OMEGA), (0.25, XI_PERP)])
    G1 = Integrand.linear_dip(0.25, OMEGA)
    G2 = Integrand.linear_dip(0.25, XI_PERP)
    p = GrassmannPoint.basis_point(4, (1, 3))
    assert F(p) == pytest.approx(G1(p) + G2(p) - 1.0)


# -- Lipschitz extension --------------------------------------------------------


def test_extension_agrees_on_grassmannian():
    F = Integrand.linear_dip(0.5, OMEGA)
    sample = GrassmannSample.generate(4, 2, 1024, seed=1, include=[OMEGA])
    # with the point sampled, the Lipschitz property pins the minimum exactly
    assert lipschitz_extension(F, OMEGA.vec, sample) == pytest.approx(F(OMEGA))
    other = GrassmannPoint.basis_point(4, (2, 3))
    val = lipschitz_extension(F, other.vec, sample)
    nearest = min(float((other.vec - p.vec).norm()) for p in sample.points)
    # Lipschitz lower bound, nearest-atom upper bound
    assert F(other) - 1e-12 <= val <= F(other) + 2 * F.lip * nearest + 1e-12


def test_extension_at_origin_is_min_plus_distance():
    F = Integrand.linear_dip(0.5, OMEGA)
    sample = GrassmannSample.generate(4, 2, 256, seed=2)
    val = lipschitz_extension(F, KVector.zero(4, 2), sample)
    expected = min(F(p) + F.lip * 1.0 for p in sample.points)
    assert val == pytest.approx(expected)


def test_extension_area_band():
    F = Integrand.area()
    sample = GrassmannSample.generate(4, 2, 256, seed=3)
    x = GrassmannPoint.basis_point(4, (1, 4)).vec
    val = lipschitz_extension(F, x, sample)
    assert val == pytest.approx(1.0)  # L = 0 collapses the inf-convolution


def test_extension_requires_lip():
    F = Integrand(kind="area", lip=math.inf)
    with pytest.raises(ConfigurationError):
        lipschitz_extension(F, OMEGA.vec)


# -- hull LP -------------------------------------------------------------------


def test_hull_at_sample_atom_never_exceeds_value():
    F = Integrand.linear_dip(0.3, OMEGA)
    sample = GrassmannSample.generate(4, 2, 128, seed=4)
    for p in sample.points[:10]:
        hull = conv_hull_value(F, p.vec, sample)
        assert hull.value <= F(p) + 1e-9


def test_hull_area_is_norm_at_atoms_and_refinement_monotone():
    F = Integrand.area()
    xi = GrassmannPoint.basis_point(4, (1, 3))
    sample = GrassmannSample.generate(4, 2, 128, seed=5, include=[xi])
    values = []
    for _ in range(3):
        hull = conv_hull_value(F, xi.vec, sample)
        # triangle inequality holds at every feasible point, so value >= |xi|
        assert hull.value >= 1.0 - 1e-9
        values.append(hull.value)
        sample = sample.refined(128)
    assert values[0] + 1e-9 >= values[1] >= values[2] - 1e-9
    assert values[-1] == pytest.approx(1.0, abs=1e-3)


def test_hull_positive_homogeneity():
    F = Integrand.linear_dip(0.4, OMEGA)
    xi = GrassmannPoint.basis_point(4, (1, 3))
    sample = GrassmannSample.generate(4, 2, 256, seed=6, include=[xi])
    v1 = conv_hull_value(F, xi.vec, sample).value
    v3 = conv_hull_value(F, 3.0 * xi.vec, sample).value
    assert v3 == pytest.approx(3.0 * v1, rel=1e-9)


def test_hull_support_within_caratheodory_bound():
    F = Integrand.area()
    xi = GrassmannPoint.basis_point(4, (1, 3))
    sample = GrassmannSample.generate(4, 2, 512, seed=7, include=[xi])
    hull = conv_hull_value(F, xi.vec, sample)
    assert len(hull.weights) <= 6  # binomial(4, 2)


def test_hull_exact_kingdom_on_basis_atoms():
    pts = [GrassmannPoint.basis_point(4, e) for e in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))]
    pts += [-p for p in pts]
    sample = GrassmannSample(4, 2, tuple(pts), seed=0, scheme="antipodal-closed")
    hull = conv_hull_value(Integrand.area(), KVector.basis(4, (1, 3)), sample)
    assert hull.exact
    assert hull.value == 1


def test_dip_hull_matches_closed_form():
    # derived oracle: hull value sqrt(1+2a) at e1^e3 for the dip at e1^e2
    a = 0.9
    F = Integrand.linear_dip(a, OMEGA)
    xi = GrassmannPoint.basis_point(4, (1, 3))
    plus, minus = dip_witness_atoms(a)
    sample = GrassmannSample.generate(4, 2, 512, seed=8, include=[xi, plus, minus])
    hull = conv_hull_value(F, xi.vec, sample)
    assert hull.value == pytest.approx(math.sqrt(1 + 2 * a), abs=1e-9)
    # dual certificate: sqrt(1+2a) <xi, .> stays below F on a fine sample
    probe = GrassmannSample.generate(4, 2, 2000, seed=9)
    bound = math.sqrt(1 + 2 * a)
    for p in probe.points:
        assert bound * p.inner(xi) <= F(p) + 1e-9


# -- polyconvexity gap reports ---------------------------------------------------


def test_area_report_no_gap():
    rep = is_polyconvex_report(Integrand.area(), GrassmannSample.generate(4, 2, 96, seed=10))
    assert rep.max_gap <= rep.tol
    assert not rep.violation_found


def test_dip_report_positive_gap_at_witness():
    a = 0.9
    F = Integrand.linear_dip(a, OMEGA)
    xi = GrassmannPoint.basis_point(4, (1, 3))
    plus, minus = dip_witness_atoms(a)
    sample = GrassmannSample.generate(4, 2, 256, seed=11, include=[xi, plus, minus])
    rep = is_polyconvex_report(F, sample)
    assert rep.violation_found
    expected_gap = (1 + a) - math.sqrt(1 + 2 * a)
    assert rep.max_gap >= expected_gap - 1e-9


def test_bump_formula_is_polyconvex():
    # 1 - 0.9(1 - |<xi,omega>|) restricts the gauge 0.1|x| + 0.9|x.omega|:
    # the report must find no violation anywhere.
    F = Integrand.linear_dip(-0.9, OMEGA)
    rep = is_polyconvex_report(F, GrassmannSample.generate(4, 2, 96, seed=12))
    assert rep.max_gap <= max(rep.tol, 1e-9)


def test_tabulated_norm_restriction_no_gap():
    # F = l1 norm of coordinates restricted to basis atoms: a gauge restriction
    pts = [GrassmannPoint.basis_point(4, e) for e in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))]
    pts += [-p for p in pts]
    sample = GrassmannSample(4, 2, tuple(pts), seed=0, scheme="antipodal-closed")
    F = Integrand.tabulated(sample.points, [1.0] * len(sample.points), lip=2.0)
    rep = is_polyconvex_report(F, sample, tol=1e-9)
    assert rep.max_gap <= 1e-9


# -- homogenized bump non-convexity ----------------------------------------------


def test_nonconvexity_closed_form_value():
    out = homogenization_nonconvexity_check(2.0, 5.0, OMEGA)
    assert out["closed_form"] == pytest.approx(-27.0)
    assert out["relative_gap"] <= 1e-4


def test_nonconvexity_boundary_case_is_zero():
    r = 2.0
    p = (1 + r) ** 2 / r
    out = homogenization_nonconvexity_check(r, p, OMEGA)
    assert out["closed_form"] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("r,p", [(2.0, 5.0), (3.0, 6.0), (1.5, 4.2)])
def test_nonconvexity_fd_agreement_and_sign(r, p):
    out = homogenization_nonconvexity_check(r, p, OMEGA)
    assert out["relative_gap"] <= 1e-4
    if p > (1 + r) ** 2 / r:
        assert out["closed_form"] < 0
        assert out["finite_difference"] < 0


def test_nonconvexity_rejects_bad_params():
    with pytest.raises(ValueError):
        homogenization_nonconvexity_check(0.5, 10.0, OMEGA)
    with pytest.raises(ValueError):
        homogenization_nonconvexity_check(2.0, 3.0, OMEGA)
