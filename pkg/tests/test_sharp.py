import numpy as np
import pytest

from holderexp import sharp
from holderexp.exceptions import PreconditionError
from holderexp.sharp import (Resolution, SharpParams, find_admissible_range, interface_checks,
                             make_params, mcond_equivalence_check, u_tau, verify_sharpness,
                             w_tau, w_tau_derivative, zeta)


def test_param_examples():
    p = make_params(0.0, 7.0)
    assert p.c == 1.0 and p.m == 1.0
    assert p.exponent == pytest.approx(4 / np.pi * np.arctan(7 ** -0.5))
    assert make_params(1.0, 1.0).exponent == 1.0
    p = make_params(1.0, 2.0)
    assert p.mu == 1.0 and p.c == pytest.approx(4 / 3) and p.exponent == pytest.approx(0.75)


@pytest.mark.parametrize("tau,M", [(-0.1, 2.0), (1.5, 2.0), (0.5, 0.9), (0.5, np.inf)])
def test_param_validation(tau, M):
    with pytest.raises(PreconditionError):
        SharpParams(tau, M)


@pytest.mark.parametrize("tau,M", [(0.0, 9.0), (0.25, 2.0), (0.5, 1.2), (1.0, 2.0)])
def test_profile_continuity_and_antisymmetry(tau, M):
    p = make_params(tau, M)
    th = np.linspace(0, np.pi, 301)
    np.testing.assert_allclose(w_tau(p, th + np.pi), -w_tau(p, th), atol=1e-13)
    for s in p.starts:
        left, right = w_tau(p, s - 1e-12), w_tau(p, s + 1e-12)
        assert abs(left - right) < 1e-9
    # finite differences of the profile away from interfaces
    t = np.linspace(0.01, 2 * np.pi - 0.01, 400)
    t = t[np.min(np.abs(t[:, None] - np.append(p.starts, 2 * np.pi)[None]), axis=1) > 1e-3]
    h = 1e-6
    fd = (w_tau(p, t + h) - w_tau(p, t - h)) / (2 * h)
    np.testing.assert_allclose(w_tau_derivative(p, t), fd, atol=1e-6)


def test_u_tau_matches_polar_form():
    p = make_params(0.5, 1.2)
    rng = np.random.default_rng(3)
    r = rng.uniform(0.01, 1, 50)
    t = rng.uniform(-np.pi, np.pi, 50)
    x = np.column_stack((r * np.cos(t), r * np.sin(t)))
    np.testing.assert_allclose(u_tau(p, x), r ** p.exponent * w_tau(p, t), rtol=1e-13)
    assert u_tau(p, np.zeros(2)) == 0.0
    # homogeneity
    np.testing.assert_allclose(u_tau(p, 0.3 * x), 0.3 ** p.exponent * u_tau(p, x),
                               rtol=1e-12)


@pytest.mark.parametrize("tau,M", [(0.0, 100.0), (0.5, 1.05), (0.75, 1.2), (1.0, 1.0)])
def test_interface_checks(tau, M):
    assert interface_checks(make_params(tau, M)).passed


def test_weak_residuals():
    p = make_params(0.25, 2.0)
    assert sharp.weak_residual_2d(p) < 1e-8
    assert sharp.weak_residual(sharp.profile_mode(p), sharp.sharp_weights(p)) < 1e-8


def test_zeta_values():
    assert zeta(0.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    e = np.array([0.1, 0.5, 0.9])
    assert np.all(zeta(e, 0.0) > 0)
    with pytest.raises(PreconditionError):
        zeta(-0.1, 0.0)
    with pytest.raises(PreconditionError):
        zeta(1.5, 0.0)


def test_mcond_sign_matches_zeta():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = rng.uniform(1.001, 3.0)
        eps = rng.uniform(0, 1)
        lhs, rhs, z = mcond_equivalence_check(eps, m)
        assert np.sign(rhs - lhs) == np.sign(z) or abs(rhs - lhs) < 1e-13


def test_admissible_range():
    rng = find_admissible_range()
    assert rng.epsilon0 == pytest.approx(0.52777, abs=1e-4)
    assert rng.m0 == pytest.approx(1.2400, abs=1e-3)
    d = np.linspace(0, rng.delta0, 501)[1:]
    assert np.all(zeta(rng.epsilon0, d) > 0)
    assert zeta(rng.epsilon0, rng.delta0 + 1e-3) < 0
    assert rng.M_max(0.0) == np.inf
    assert rng.M_max(1.0) == pytest.approx(rng.m0)
    assert rng.M_max(0.5) == pytest.approx(rng.m0 ** 2)
    assert rng.admits(1.0, 1.2) and not rng.admits(1.0, 2.0)


def test_verify_sharpness_admissible():
    v = verify_sharpness(0.5, 1.2, Resolution.fast())
    assert v.admissible and v.passed
    assert {s.status for s in v.stages} == {"pass"}
    assert v.stage("beta").error < 1e-6


def test_verify_sharpness_beyond_range_is_flagged():
    v = verify_sharpness(1.0, 2.0, Resolution.fast())
    assert not v.admissible
    assert v.stage("beta").status == "out-of-range"
    assert v.stage("sturm_liouville").status == "pass"
    assert v.stage("holder_fit").status == "pass"


def test_off_centre_circle_beats_centre_beyond_range():
    p = make_params(1.0, 2.0)
    _, excess = sharp.first_exceeding_center(p, 3.0, 11)
    assert excess > 1e-3
    _, excess = sharp.first_exceeding_center(make_params(1.0, 1.2), 3.0, 11)
    assert excess <= 1e-9


def test_eigenfunction_match():
    err, sol = sharp.eigenfunction_match(make_params(0.75, 1.05), 1024)
    assert err < 1e-3
    assert sol.gamma == pytest.approx(sharp.exponent(0.75, 1.05), abs=1e-5)
