import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bclab import factory, grids
from bclab.errors import Degenerate, OutOfDomain, RankDeficient
from bclab.geometry import (
    Jet,
    ParametricHypersurface,
    curvature_spectrum,
    evaluate_jet,
    induced_metric,
    local_geometry,
    mean_curvatures,
    second_fundamental_form,
    unit_normal,
)
from bclab.profile import theta_derivatives


def test_plane_jet_is_affine():
    jet = evaluate_jet(factory.plane(3), np.array([1.0, 2.0, 3.0]), order=1)
    np.testing.assert_array_equal(jet.d1, np.eye(4)[:3])
    jet2 = evaluate_jet(factory.plane(3), np.array([1.0, 2.0, 3.0]), order=2)
    np.testing.assert_array_equal(jet2.d2, 0.0)


def test_sphere_second_derivatives_have_radial_part_minus_g_over_r2():
    surface = factory.sphere(3, 2.0)
    u = np.array([math.pi / 2, math.pi / 2, 1.0])  # on the equator
    jet = evaluate_jet(surface, u, order=2)
    x = jet.point
    assert np.linalg.norm(x) == pytest.approx(2.0, abs=1e-14)
    g = induced_metric(jet).g
    for i in range(3):
        for j in range(3):
            radial = (jet.d2[i, j] @ x) * x / (x @ x)
            np.testing.assert_allclose(radial, -0.25 * g[i, j] * x, atol=1e-13)


@pytest.mark.parametrize("kind", ["sphere", "torus", "ellipsoid", "rot"])
def test_mixed_partials_are_exactly_symmetric(kind, rot_surface):
    surface = {
        "sphere": factory.sphere(4, 1.0),
        "torus": factory.torus(),
        "ellipsoid": factory.ellipsoid((1.0, 1.3, 1.7)),
        "rot": rot_surface,
    }[kind]
    for u in grids.halton_grid(surface, 3):
        jet = evaluate_jet(surface, u, 3)
        np.testing.assert_array_equal(jet.d2, jet.d2.transpose(1, 0, 2))
        np.testing.assert_array_equal(jet.d3, jet.d3.transpose(1, 0, 2, 3))
        np.testing.assert_array_equal(jet.d3, jet.d3.transpose(0, 2, 1, 3))


def test_plane_metric_is_identity():
    metric = induced_metric(evaluate_jet(factory.plane(3), np.zeros(3), 1))
    np.testing.assert_array_equal(metric.g, np.eye(3))


def test_rotational_metric_is_block_diagonal(rot_surface, rot_curve):
    for u in grids.halton_grid(rot_surface, 5):
        metric = induced_metric(evaluate_jet(rot_surface, u, 1))
        psi, phi, _ = rot_curve.state_at(u[0])
        expected = np.diag(
            [1.0, psi**2, psi**2 * math.sin(u[1]) ** 2, phi**2, phi**2 * math.sin(u[3]) ** 2]
        )
        np.testing.assert_allclose(metric.g, expected, atol=1e-12)
        np.testing.assert_allclose(metric.g @ metric.g_inv, np.eye(5), atol=1e-10)


def test_sphere_normal_is_radial_and_orthogonal():
    surface = factory.sphere(3, 1.0)
    for u in grids.halton_grid(surface, 5):
        jet = evaluate_jet(surface, u, 1)
        n = unit_normal(jet, surface.orientation)
        np.testing.assert_allclose(n, -jet.point, atol=1e-12)  # inward by construction
        np.testing.assert_allclose(jet.d1 @ n, 0.0, atol=1e-10)


def test_plane_normal_is_last_axis():
    surface = factory.plane(3)
    jet = evaluate_jet(surface, np.array([0.3, -2.0, 4.0]), 1)
    np.testing.assert_allclose(unit_normal(jet, surface.orientation), [0, 0, 0, 1])


def test_second_fundamental_forms_of_model_surfaces():
    lg = local_geometry(factory.plane(3), np.array([0.1, 0.2, 0.3]))
    np.testing.assert_array_equal(lg.shape.h, 0.0)
    for r in (0.5, 2.0):
        surface = factory.sphere(3, r)
        lg = local_geometry(surface, grids.base_point(surface))
        np.testing.assert_allclose(lg.shape.h, lg.metric.g / r, atol=1e-9)
        np.testing.assert_allclose(lg.S, np.eye(3) / r, atol=1e-12)
    cyl = factory.round_cylinder(2, 1.0, 1)
    lg = local_geometry(cyl, grids.base_point(cyl))
    assert np.linalg.matrix_rank(lg.shape.h, tol=1e-10) == 2
    np.testing.assert_allclose(lg.shape.h[2], 0.0, atol=1e-15)
    np.testing.assert_allclose(lg.shape.h[:, 2], 0.0, atol=1e-15)


def test_flipping_orientation_flips_shape_operator():
    surface = factory.sphere(3, 2.0)
    flipped = ParametricHypersurface(surface.chart, surface.domain_box, surface.jet_oracle, orientation=-surface.orientation)
    u = grids.base_point(surface)
    np.testing.assert_allclose(local_geometry(flipped, u).S, -local_geometry(surface, u).S, atol=1e-14)


def test_rotational_shape_operator_is_diag_in_chart_coordinates(rot_surface, rot_curve):
    for u in grids.halton_grid(rot_surface, 5):
        lg = local_geometry(rot_surface, u)
        psi, phi, theta = rot_curve.state_at(u[0])
        k1 = theta_derivatives((psi, phi, theta), "rotational", 2, 2)[0]
        k2 = math.sin(theta) / psi  # phi'/psi
        k3 = -math.cos(theta) / phi  # -psi'/phi
        np.testing.assert_allclose(lg.S, np.diag([k1, k2, k2, k3, k3]), atol=1e-10)


def test_cylinder_shape_operator_is_diag_in_chart_coordinates(cyl_surface, cyl_curve):
    for u in grids.halton_grid(cyl_surface, 5):
        lg = local_geometry(cyl_surface, u)
        psi, phi, theta = cyl_curve.state_at(u[0])
        k1 = theta_derivatives((psi, phi, theta), "cylinder", 2, 2)[0]
        k2 = math.sin(theta) / psi
        np.testing.assert_allclose(lg.S, np.diag([k1, k2, k2, 0.0, 0.0]), atol=1e-10)


def test_model_spectra():
    sph = factory.sphere(4, 0.5)
    spec = curvature_spectrum(sph, grids.base_point(sph))
    assert spec.multiplicities == (4,)
    assert spec.groups[0][0] == pytest.approx(2.0, abs=1e-12)
    cyl = factory.round_cylinder(2, 1.0, 2)
    spec = curvature_spectrum(cyl, grids.base_point(cyl))
    assert spec.multiplicities == (2, 2)
    np.testing.assert_allclose([v for v, _ in spec.groups], [1.0, 0.0], atol=1e-12)


def test_rotational_spectrum_has_multiplicities_one_two_two(rot_surface):
    for u in grids.halton_grid(rot_surface, 10):
        assert sorted(curvature_spectrum(rot_surface, u).multiplicities) == [1, 2, 2]


def test_mean_curvatures_examples():
    s1, s2 = mean_curvatures(curvature_spectrum(factory.sphere(3, 1.0), np.array([1.0, 1.0, 1.0])))
    assert (s1, s2) == (pytest.approx(3.0), pytest.approx(3.0))
    assert mean_curvatures([2.0, 0.0, 0.0]) == (2.0, 0.0)


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_power_sum_identity(k):
    s1, s2 = mean_curvatures(k)
    assert s1 * s1 - 2 * s2 == pytest.approx(sum(x * x for x in k), abs=1e-12 * (1 + s1 * s1))


def test_out_of_domain_and_rank_deficient():
    with pytest.raises(OutOfDomain):
        evaluate_jet(factory.sphere(3), np.array([0.0, 1.0, 1.0]))
    cusp = ParametricHypersurface(lambda u: np.array([u[0], u[1] ** 3, 0.0]), [(-1, 1), (-1, 1)])
    with pytest.raises(RankDeficient):
        evaluate_jet(cusp, np.array([0.5, 0.0]))


def test_tiny_metric_is_degenerate():
    jet = Jet(order=1, u=np.zeros(2), point=np.zeros(3), d1=1e-7 * np.eye(3)[:2])
    with pytest.raises(Degenerate):
        induced_metric(jet)


def test_finite_difference_fallback_agrees_with_analytic_jets():
    torus = factory.torus()
    plain = ParametricHypersurface(torus.chart, torus.domain_box, orientation=torus.orientation)
    u = grids.base_point(torus)
    a, b = local_geometry(torus, u), local_geometry(plain, u)
    np.testing.assert_allclose(b.spectrum.eigenvalues, a.spectrum.eigenvalues, atol=1e-7)
    np.testing.assert_allclose(second_fundamental_form(b.jet, b.shape.normal), a.shape.h, atol=1e-7)
