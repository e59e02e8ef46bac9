import numpy as np
import pytest

from holderexp.bounds import (CircleScan, HomogeneousSolution, beta, beta0, circle_weights,
                              compute_bounds, dirichlet_energy, empirical_holder_exponent,
                              energy_decay_check, oscillation, ps_general_bound,
                              ps_isotropic_bound, unitdet_bound)
from holderexp.circle import Circle
from holderexp.exceptions import (EmptyScanError, OriginError, PreconditionError)
from holderexp.field import AngularPiecewise, Disk, GridSampled, SharpFamily, identity_field
from holderexp.wirtinger import best_constant, bound_prelimCab


def mu_over_c(tau, M):
    return 2 / np.pi * (1 + M ** -tau) * np.arctan(M ** (-(1 - tau) / 2))


def test_ps_bounds():
    assert ps_general_bound(4.0) == 0.5
    assert ps_isotropic_bound(1.0) == pytest.approx(1.0)
    assert ps_isotropic_bound(9.0) == pytest.approx(4 / np.pi * np.arctan(1 / 3))
    with pytest.raises(PreconditionError):
        ps_general_bound(0.5)


def test_scan_lattice():
    scan = CircleScan.lattice(Disk(), 5, 3)
    assert len(scan) == 9 * 3
    d = 1 - np.hypot(scan.x, scan.y)
    assert np.all(scan.rho <= d / 2 + 1e-15)
    assert np.all(scan.rho > 0)


def test_identity_field_all_bounds_one():
    report, table = compute_bounds(identity_field(), CircleScan.lattice(Disk(), 5, 3),
                                   beta0_scan=CircleScan.lattice(Disk(), 3, 2), n_grid=512)
    assert report.beta == pytest.approx(1.0, abs=1e-13)
    assert report.unitdet == pytest.approx(1.0, abs=1e-13)
    assert report.ps_isotropic == pytest.approx(1.0)
    assert report.beta0 == pytest.approx(1.0, abs=1e-8)
    assert report.L == 1.0
    assert len(table.rho) == report.n_circles


@pytest.mark.parametrize("tau,M", [(1.0, 1.2), (0.5, 1.2), (0.25, 2.0), (0.0, 4.0)])
def test_sharp_beta_closed_form(tau, M):
    f = SharpFamily(tau, M)
    assert beta(f, CircleScan.lattice(f.domain, 9, 4)).value == pytest.approx(
        mu_over_c(tau, M), abs=1e-12)


def test_tau_one_beta_is_unitdet():
    f = SharpFamily(1.0, 1.2)
    scan = CircleScan.lattice(f.domain, 9, 4)
    b = beta(f, scan)
    np.testing.assert_allclose(b.table.det_ratio, 1.0, atol=1e-14)
    assert b.value == pytest.approx(unitdet_bound(f, scan), abs=1e-15)
    assert b.value == pytest.approx((1 + 1 / 1.2) / 2, abs=1e-13)


def test_unitdet_centred_circle_at_contrast_two():
    f = SharpFamily(1.0, 2.0)
    centred = CircleScan.from_circles([Circle((0, 0), 0.5)])
    assert unitdet_bound(f, centred) == pytest.approx(0.75, abs=1e-14)
    # a fuller scan finds off-centre circles with a larger average, so the
    # bound drops below the centred value at this contrast
    assert unitdet_bound(f, CircleScan.lattice(f.domain, 33, 12)) < 0.75 - 1e-3


def test_unitdet_precondition():
    with pytest.raises(PreconditionError):
        unitdet_bound(SharpFamily(0.5, 2.0), CircleScan.lattice(Disk(), 3, 1))


def test_isotropic_two_phase_beta():
    M = 9.0
    f = SharpFamily(0.0, M)
    assert beta(f, CircleScan.lattice(f.domain, 9, 4)).value == pytest.approx(
        ps_isotropic_bound(M), abs=1e-12)


def test_empty_scan():
    f = SharpFamily(1.0, 2.0)
    with pytest.raises(EmptyScanError):
        beta(f, CircleScan.from_circles([Circle((0.6, 0.8), 1.0)]))


def test_beta_tie_break_is_lexicographic():
    f = SharpFamily(0.0, 4.0)
    scan = CircleScan.from_circles([Circle((0, 0), 0.5), Circle((0, 0), 0.25)])
    assert beta(f, scan).circle == (0.0, 0.0, 0.25)


def test_circle_weights_reproduce_average_and_bound():
    f = AngularPiecewise([0.0, 1.0, 2.5, 4.0], [1.0, 3.0, 0.5, 2.0], [2.0, 1.0, 1.5, 0.7])
    c = Circle((0.3, -0.1), 0.4)
    w = circle_weights(f, c)
    t = np.linspace(0, 2 * np.pi, 7)
    np.testing.assert_allclose(w.a(t) * w.b(t), f.det_on(*c.points(t)))
    C = best_constant(w, 1024).C
    assert C <= bound_prelimCab(w) + 1e-8


def test_beta_below_beta0_on_sharp_and_random():
    f = SharpFamily(0.5, 1.2)
    scan = CircleScan.lattice(f.domain, 5, 2)
    b0 = beta0(f, scan, n_grid=1024)
    assert b0.value == pytest.approx(mu_over_c(0.5, 1.2), abs=1e-6)
    f = AngularPiecewise([0.0, 2.0, 3.0], [1.0, 4.0, 0.3], [2.0, 0.5, 1.0], rotate=False)
    scan = CircleScan.lattice(f.domain, 5, 2)
    b0 = beta0(f, scan, n_grid=1024)
    assert beta(f, scan).value <= b0.value + b0.error_estimate


def test_grid_field_bounds():
    a = np.ones((4, 4))
    a[:2, :2] = 4.0
    f = GridSampled(-1, -1, 0.5, 0.5, a, np.zeros((4, 4)), a)
    report, _ = compute_bounds(f, CircleScan.lattice(f.domain, 5, 2), with_beta0=False)
    assert report.ps_isotropic == pytest.approx(ps_isotropic_bound(4.0))
    # a circle centred on the corner of the high phase sees both values
    assert report.beta >= report.ps_isotropic - 1e-12
    assert report.beta < 1.0


# energy and oscillation -----------------------------------------------------------

def test_linear_solution_energy_on_identity():
    u = HomogeneousSolution.linear(0.3)
    f = identity_field()
    # |grad u| = 1, energy = area of the disc
    for center, r in [((0, 0), 0.7), ((0.2, 0.1), 0.5), ((0.5, 0.0), 0.2), ((0.3, 0.4), 0.5)]:
        assert dirichlet_energy(u, f, center, r) == pytest.approx(np.pi * r * r, rel=1e-12)


def test_energy_decay_for_linear_solution():
    u = HomogeneousSolution.linear()
    v = energy_decay_check(u, identity_field(), (0, 0), np.geomspace(1e-3, 1, 7), 1.0)
    assert v.nondecreasing and v.relative_spread < 1e-12
    with pytest.raises(PreconditionError):
        energy_decay_check(u, identity_field(), (0, 0), [1.0, 0.5], 1.0)


def test_energy_needs_polar_field():
    f = GridSampled(-1, -1, 1, 1, np.ones((2, 2)), np.zeros((2, 2)), np.ones((2, 2)))
    with pytest.raises(PreconditionError):
        dirichlet_energy(HomogeneousSolution.linear(), f, (0, 0), 0.5)


def test_gradient_at_origin_rejected():
    with pytest.raises(OriginError):
        HomogeneousSolution.linear().gradient(0.0, 0.0)


def test_holder_fit_for_power_profile():
    u = HomogeneousSolution(0.4, np.cos, lambda t: -np.sin(t))
    assert empirical_holder_exponent(u, np.geomspace(1e-4, 1, 6)) == pytest.approx(0.4,
                                                                                  abs=1e-10)
    assert oscillation(u, (0, 0), 1.0) == pytest.approx(2.0, rel=1e-4)
    with pytest.raises(PreconditionError):
        empirical_holder_exponent(u, [0.1, 0.5, 1.0])
