import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from holderexp import quadrature
from holderexp.circle import (Circle, Cone, angle_trace, circle_edges, cone_arc_measure,
                              det_range, f_average, f_homogeneity_check,
                              f_integrand_direct, level_set_measure, ray_crossings)
from holderexp.exceptions import OriginError, PreconditionError, QuadratureError
from holderexp.field import AngularPiecewise, SharpFamily, identity_field


def scipy_f(field, circle):
    """Independent oracle: QUADPACK on the direct integrand, split at the
    field's breakpoints."""
    edges = circle_edges(field, circle)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = quad(lambda t: float(f_integrand_direct(field, circle, np.array([t]))[0]),
                      a, b, epsabs=1e-14, epsrel=1e-13, limit=500)
        total += val
    return total / (2 * np.pi)


# quadrature -----------------------------------------------------------------

def test_integrate_polynomial_and_step():
    val, err = quadrature.integrate(lambda t: t ** 5, 0.0, 2.0)
    assert val == pytest.approx(64 / 6, rel=1e-14)
    step = lambda t: np.where(t < 1.0, 1.0, 3.0)  # noqa: E731
    val, _ = quadrature.integrate(step, 0.0, 2.0, breakpoints=[1.0])
    assert val == pytest.approx(4.0, rel=1e-14)


def test_integrate_reports_failure():
    with pytest.raises(QuadratureError) as info:
        quadrature.integrate(lambda t: np.sign(np.sin(1e4 * t)) * np.exp(t), 0.0, 1.0,
                             max_depth=3)
    assert info.value.estimate > 0


def test_split_edges():
    e = quadrature.split_edges([3.0, -1.0, 0.5, 0.5, 2.0], 0.0, 2.0)
    np.testing.assert_array_equal(e, [0.0, 0.5, 2.0])


# geometry ---------------------------------------------------------------------

def test_circle_origin_predicates():
    assert Circle((0.6, 0.8), 1.0).passes_through_origin()
    assert Circle((0.1, 0.0), 1.0).encloses_origin()
    assert not Circle((2.0, 0.0), 1.0).encloses_origin()
    with pytest.raises(PreconditionError):
        Circle((0, 0), 0.0)


def test_ray_crossings_hit_the_rays():
    center, r = (0.3, -0.2), 1.0
    angles = np.array([0.0, 1.0, 2.5, 4.0])
    t = ray_crossings(center, r, angles)
    px, py = center[0] + r * np.cos(t), center[1] + r * np.sin(t)
    phi = np.mod(np.arctan2(py, px), 2 * np.pi)
    assert len(t) == 4
    assert np.all(np.min(np.abs(phi[:, None] - angles[None, :]), axis=1) < 1e-12)


def test_tangent_ray_gives_single_contact():
    t = ray_crossings((0.0, -0.5), 0.25, [5 * np.pi / 3])
    assert len(t) == 1


def test_winding_numbers():
    assert angle_trace(Circle((0.2, 0.1), 1.0)).winding == 1
    assert angle_trace(Circle((2.0, 0.5), 1.0)).winding == 0


def test_angle_trace_guards():
    with pytest.raises(OriginError):
        angle_trace(Circle((1.0, 0.0), 1.0))
    with pytest.raises(PreconditionError):
        angle_trace(Circle((1.0 - 1e-9, 0.0), 1.0), n_angles=16)


def test_h_is_one_on_centred_circle():
    tr = angle_trace(Circle((0.0, 0.0), 2.0))
    np.testing.assert_allclose(tr.h, 1.0, atol=1e-15)


# flux average -----------------------------------------------------------------

def test_identity_field_average_is_one():
    assert f_average(identity_field(), Circle((0.3, 0.4), 0.2)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("tau,M", [(1.0, 2.0), (0.5, 1.2), (0.0, 9.0), (0.25, 2.0)])
def test_centred_average_is_c(tau, M):
    c = 2.0 / (1.0 + M ** -tau)
    assert f_average(SharpFamily(tau, M), Circle((0, 0), 1.0)) == pytest.approx(c, abs=1e-13)


def test_interior_circle_bounded_by_c():
    f = SharpFamily(1.0, 2.0)
    val = f_average(f, Circle((0.3, 0.2), 1.0))
    assert val <= 4.0 / 3.0 + 1e-9


def test_bracket_and_direct_integrands_agree():
    f = SharpFamily(1.0, 2.0)
    c = Circle((-1.35, 0.75), 1.0)
    a = f_average(f, c)
    b = f_average(f, c, direct=True)
    assert a == pytest.approx(b, abs=1e-13)
    assert a == pytest.approx(scipy_f(f, c), abs=1e-11)


def test_average_against_quadpack_off_centre():
    f = AngularPiecewise([0.0, 1.0, 2.5, 4.0], [1.0, 3.0, 0.5, 2.0],
                         [2.0, 1.0, 1.5, 0.7])
    for center, r in [((0.4, -0.3), 0.7), ((1.5, 1.0), 0.9), ((-0.2, 0.05), 0.1)]:
        c = Circle(center, r)
        assert f_average(f, c) == pytest.approx(scipy_f(f, c), abs=1e-11)


def test_origin_circle_rejected():
    with pytest.raises(OriginError):
        f_average(SharpFamily(1.0, 2.0), Circle((0.6, 0.8), 1.0))


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 20.0))
def test_homogeneity(x, y, rho):
    if abs(np.hypot(x, y) - rho) < 1e-6 * rho:
        return
    a, b = f_homogeneity_check(SharpFamily(0.5, 1.5), (x, y), rho)
    assert a == pytest.approx(b, abs=1e-12)


def test_det_range_exact():
    f = SharpFamily(0.0, 4.0)
    assert det_range(f, Circle((0, 0), 1.0)) == (1.0, 16.0)
    assert det_range(f, Circle((0.5, 0.1), 0.05)) == (1.0, 1.0)


# cones and level sets ------------------------------------------------------------

def test_cone_measure_centred():
    cone = Cone(0.3, 1.3)
    assert cone_arc_measure(cone, (0.0, 0.0), 2.0) == pytest.approx(4.0, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, np.pi), st.floats(0.01, np.pi - 0.01), st.floats(0, 0.999),
       st.floats(0, 2 * np.pi))
def test_cone_measure_invariant_inside(phi1, width, r, a):
    cone = Cone(phi1, phi1 + width)
    x = (r * np.cos(a), r * np.sin(a))
    assert cone_arc_measure(cone, x, 1.0) == pytest.approx(
        cone_arc_measure(cone, (0.0, 0.0), 1.0), abs=1e-10)


def test_cone_measure_outside_depends_on_centre():
    cone = Cone(0.0, np.pi / 2)
    assert cone_arc_measure(cone, (3.0, 3.0), 1.0) == pytest.approx(2 * np.pi)
    assert cone_arc_measure(cone, (3.0, -3.0), 1.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 10.0), st.floats(0, 2 * np.pi), st.floats(0.0, 1.0))
def test_level_set_law(d, a, k):
    got = level_set_measure((d * np.cos(a), d * np.sin(a)), k)
    assert got == pytest.approx(4 * np.arcsin(np.sqrt(k)), abs=1e-6)


def test_level_set_edge_values():
    assert level_set_measure((2.0, 0.0), 0.0) == 0.0
    assert level_set_measure((2.0, 0.0), 1.0) == pytest.approx(2 * np.pi)
    with pytest.raises(PreconditionError):
        level_set_measure((0.5, 0.0), 0.5)
