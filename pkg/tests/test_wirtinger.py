import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from holderexp.exceptions import PreconditionError
from holderexp.wirtinger import (WeightPair, assemble, best_constant, bound_prelimCab,
                                 constrained_rayleigh_minimum, random_piecewise_weights,
                                 sturm_liouville_smallest, weak_residual)

TWO_PI = 2 * np.pi


def sharp_pair(tau, M):
    half = np.pi / (1 + M ** -tau)
    q = M ** (1 - 2 * tau)
    return (WeightPair.piecewise_constant([0, half, np.pi, np.pi + half],
                                          [1, M, 1, M], [1, q, 1, q]),
            4 / np.pi * np.arctan(M ** (-(1 - tau) / 2)) / (2 / (1 + M ** -tau)))


def fourier_galerkin_gamma(a, b, K=48, n_quad=4096):
    """Oracle for smooth weights: Galerkin on the trigonometric basis."""
    t = np.linspace(0, TWO_PI, n_quad, endpoint=False)
    w = TWO_PI / n_quad
    k = np.arange(1, K + 1)
    phi = np.vstack([np.ones_like(t), np.cos(np.outer(k, t)), np.sin(np.outer(k, t))])
    dphi = np.vstack([np.zeros_like(t), -k[:, None] * np.sin(np.outer(k, t)),
                      k[:, None] * np.cos(np.outer(k, t))])
    A = (phi * a(t)) @ phi.T * w
    B = (dphi * b(t)) @ dphi.T * w
    lam = scipy.linalg.eigh(B, A, eigvals_only=True)
    return np.sqrt(np.sort(lam)[1])


def test_constant_weights():
    sol = best_constant(WeightPair.constant(), 2048)
    assert sol.C == pytest.approx(1.0, abs=1e-5)
    assert sol.multiplicity == 2
    assert best_constant(WeightPair.constant(3.0, 0.5), 512).C == pytest.approx(6.0, rel=1e-6)


def test_quarter_layout_equals_sharp_bound():
    w = WeightPair.piecewise_constant(np.arange(4) * np.pi / 2, [1, 4, 1, 4], [1, 4, 1, 4])
    expected = (np.pi / (4 * np.arctan(0.5))) ** 2
    assert best_constant(w, 2048).C == pytest.approx(expected, abs=1e-4)
    assert bound_prelimCab(w) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("tau,M", [(1.0, 1.2), (0.5, 1.05), (0.25, 2.0), (0.0, 9.0)])
def test_sharp_weights(tau, M):
    w, gamma = sharp_pair(tau, M)
    assert best_constant(w, 2048).C == pytest.approx(gamma ** -2, abs=1e-4)
    mode = sturm_liouville_smallest(w)
    assert mode.gamma == pytest.approx(gamma, abs=1e-10)
    assert mode.method == "transfer-matrix"
    assert weak_residual(mode, w) < 1e-10


def test_unit_determinant_bound_is_c_squared():
    M = 1.7
    w, _ = sharp_pair(1.0, M)
    c = 2 / (1 + 1 / M)
    assert bound_prelimCab(w) == pytest.approx(c ** 2, rel=1e-14)


def test_equal_weights_bound_numerator_is_one():
    w = WeightPair.piecewise_constant([0, 1, 3], [2, 5, 0.5], [2, 5, 0.5])
    den = 4 / np.pi * np.arctan((0.25 / 25) ** 0.25)
    assert bound_prelimCab(w) == pytest.approx(den ** -2, rel=1e-14)


def test_bound_dominates_on_random_weights():
    rng = np.random.default_rng(7)
    for _ in range(25):
        w = random_piecewise_weights(rng)
        assert best_constant(w, 1024).C <= bound_prelimCab(w) + 1e-6


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_transfer_matrix_agrees_with_finite_differences(seed):
    w = random_piecewise_weights(np.random.default_rng(seed))
    fd = best_constant(w, 2048)
    tm = sturm_liouville_smallest(w)
    assert tm.gamma == pytest.approx(fd.gamma, rel=1e-7)
    assert tm.multiplicity == fd.multiplicity


def test_smooth_weights_against_fourier_galerkin():
    a = lambda t: 2 + np.cos(t)  # noqa: E731
    b = lambda t: 1 + 0.5 * np.sin(2 * t)  # noqa: E731
    w = WeightPair.from_functions(a, b)
    sol = best_constant(w, 2048)
    assert sol.gamma == pytest.approx(fourier_galerkin_gamma(a, b), rel=1e-8)
    mode = sturm_liouville_smallest(w)
    assert mode.method == "finite-difference"
    assert mode.gamma == pytest.approx(sol.gamma, rel=1e-12)


def test_constrained_minimisation_matches_eigensolver():
    w = random_piecewise_weights(np.random.default_rng(3))
    C, nodes, vec = constrained_rayleigh_minimum(w, 64)
    assert C == pytest.approx(best_constant(w, 64, richardson=False).C, rel=1e-9)
    _, mass = assemble(w, nodes)
    assert abs(mass @ vec) < 1e-10


def test_richardson_improves_on_fine_mesh():
    w, gamma = sharp_pair(0.5, 1.2)
    sol = best_constant(w, 512)
    exact = gamma ** -2
    assert abs(sol.C - exact) < abs(sol.C_fine - exact)
    assert abs(sol.C_fine - exact) < abs(sol.C_coarse - exact)
    # second order: halving h divides the error by about four
    ratio = (sol.C_coarse - exact) / (sol.C_fine - exact)
    assert 3.5 < ratio < 4.5


def test_eigenfunction_normalisation_and_sign():
    sol = best_constant(WeightPair.constant(), 256)
    assert sol.w @ (sol.mass * sol.w) == pytest.approx(1.0)
    assert sol.w @ (sol.mass * np.sin(sol.theta)) >= 0
    assert abs(sol.mass @ sol.w) < 1e-10


def test_weak_residual_detects_wrong_exponent():
    w, gamma = sharp_pair(0.5, 1.2)
    mode = sturm_liouville_smallest(w)
    mode.gamma *= 1.01
    assert weak_residual(mode, w) > 1e-4


def test_from_samples():
    w = WeightPair.from_samples(np.ones(8), np.ones(8))
    assert best_constant(w, 256).C == pytest.approx(1.0, abs=1e-6)
    assert w.a(np.array([TWO_PI - 0.01]))[0] == 1.0
    with pytest.raises(PreconditionError):
        WeightPair.from_samples(np.ones(4), np.ones(5))


def test_preconditions():
    with pytest.raises(PreconditionError):
        best_constant(WeightPair.constant(), 32)
    with pytest.raises(PreconditionError):
        WeightPair.piecewise_constant([0.0, 1.0], [1.0, -1.0], [1.0, 1.0])
    with pytest.raises(PreconditionError):
        WeightPair.piecewise_constant([0.5], [1.0], [1.0])
