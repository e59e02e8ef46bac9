"""Best constants in the weighted Wirtinger inequality.

For positive 2pi-periodic weights a, b the best constant ``C(a, b)`` in

    int a w^2 <= C(a, b) int b w'^2,   w periodic, int a w = 0,

is ``1 / lambda_1`` where ``lambda_1`` is the smallest nonzero eigenvalue of
the periodic problem ``-(b w')' = lambda a w``: integrating the equation over
a period shows every eigenfunction with ``lambda != 0`` already satisfies the
constraint, so the Lagrange multiplier of the constraint vanishes.

Two independent routes are provided:

* :func:`best_constant` -- second-order finite differences (cell-vertex
  finite volumes with harmonic averaging of b) on a breakpoint-aligned
  periodic mesh, shift-invert subspace iteration, Richardson extrapolation;
* :func:`sturm_liouville_smallest` -- for piecewise-constant weights, the
  exact transfer matrix of each arc and the Floquet condition
  ``trace(monodromy) = 2``.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import brentq, minimize_scalar
from scipy.sparse.linalg import splu

from . import quadrature
from .exceptions import ConvergenceError, PreconditionError

TWO_PI = 2.0 * np.pi
_CELL_X, _CELL_W = np.polynomial.legendre.leggauss(8)


# --------------------------------------------------------------------------
# weights

@dataclass(frozen=True)
class WeightPair:
    """Positive periodic weights ``a`` and ``b`` as vectorised callables.

    ``breakpoints`` lists parameters where either weight may jump; they
    become mesh nodes.  ``arcs`` is set for piecewise-constant weights as
    ``(starts, a_values, b_values)``.  ``ab_range`` optionally carries the
    exact essential range of ``a*b``.  ``density`` optionally grades the
    mesh (nodes equidistribute its integral).
    """

    a: object
    b: object
    breakpoints: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    arcs: tuple = None
    ab_range: tuple = None
    density: object = None

    @classmethod
    def piecewise_constant(cls, starts, a_values, b_values):
        starts = np.asarray(starts, dtype=float)
        av = np.asarray(a_values, dtype=float)
        bv = np.asarray(b_values, dtype=float)
        if not (starts.shape == av.shape == bv.shape) or starts.ndim != 1:
            raise PreconditionError("starts and values must be 1-D of equal length")
        if starts[0] != 0.0 or np.any(np.diff(starts) <= 0) or starts[-1] >= TWO_PI:
            raise PreconditionError("arc starts must increase in [0, 2pi) from 0")
        if np.any(av <= 0) or np.any(bv <= 0):
            raise PreconditionError("weights must be positive (class B)")

        def lookup(values):
            def fn(t):
                idx = np.searchsorted(starts, np.mod(t, TWO_PI), side="right") - 1
                return values[idx]
            return fn

        ab = av * bv
        return cls(lookup(av), lookup(bv), starts.copy(), (starts, av, bv),
                   (float(ab.min()), float(ab.max())))

    @classmethod
    def constant(cls, a=1.0, b=1.0):
        return cls.piecewise_constant([0.0], [a], [b])

    @classmethod
    def from_samples(cls, a_samples, b_samples):
        """Uniform samples at ``t_j = 2 pi j / N``, each held constant on the
        cell of width ``2 pi / N`` centred at its sample point."""
        a_samples = np.asarray(a_samples, dtype=float)
        b_samples = np.asarray(b_samples, dtype=float)
        n = len(a_samples)
        if len(b_samples) != n:
            raise PreconditionError("sample arrays differ in length")
        h = TWO_PI / n
        # the cell of sample 0 wraps around: [2pi - h/2, 2pi) U [0, h/2)
        starts = np.concatenate(([0.0], h * (np.arange(n) + 0.5)))
        av = np.concatenate((a_samples, a_samples[:1]))
        bv = np.concatenate((b_samples, b_samples[:1]))
        return cls.piecewise_constant(starts, av, bv)

    @classmethod
    def from_functions(cls, a, b, breakpoints=(), ab_range=None, density=None):
        return cls(a, b, np.asarray(breakpoints, dtype=float), None, ab_range,
                   density)

    @property
    def is_piecewise_constant(self):
        return self.arcs is not None

    def edges(self):
        return quadrature.split_edges(np.mod(self.breakpoints, TWO_PI), 0.0, TWO_PI)

    def ab_bounds(self, n_samples=64):
        """Essential inf and sup of ``a*b``; sampled when not known exactly."""
        if self.ab_range is not None:
            return self.ab_range
        nodes, _ = quadrature.composite_nodes(self.edges(), n_samples // 16 + 1)
        ab = self.a(nodes) * self.b(nodes)
        return float(ab.min()), float(ab.max())


def random_piecewise_weights(rng, n_arcs=(2, 6), value_range=(0.2, 5.0)):
    """A random pair of piecewise-constant weights on shared arcs."""
    n = int(rng.integers(n_arcs[0], n_arcs[1] + 1))
    cuts = np.sort(rng.uniform(0.0, TWO_PI, n - 1))
    starts = np.concatenate(([0.0], cuts))
    lo, hi = np.log(value_range[0]), np.log(value_range[1])
    a = np.exp(rng.uniform(lo, hi, n))
    b = np.exp(rng.uniform(lo, hi, n))
    return WeightPair.piecewise_constant(starts, a, b)


# --------------------------------------------------------------------------
# closed-form upper bound

def bound_prelimCab(weights):
    """Upper bound on C(a, b):

        ( mean(sqrt(a/b)) / ((4/pi) arctan((inf ab / sup ab)^(1/4))) )^2
    """
    if weights.is_piecewise_constant:
        starts, av, bv = weights.arcs
        lengths = np.diff(np.append(starts, TWO_PI))
        mean_ratio = float(np.sum(lengths * np.sqrt(av / bv))) / TWO_PI
    else:
        value, _ = quadrature.integrate(
            lambda t: np.sqrt(weights.a(t) / weights.b(t)), 0.0, TWO_PI,
            weights.edges(), tol=1e-12)
        mean_ratio = value / TWO_PI
    lo, hi = weights.ab_bounds()
    denominator = 4.0 / np.pi * np.arctan((lo / hi) ** 0.25)
    return (mean_ratio / denominator) ** 2


# --------------------------------------------------------------------------
# finite-difference eigen-solver

def _segment_counts(edges, n_cells, density):
    lengths = np.diff(edges)
    if density is None:
        mass = lengths
    else:
        nodes, w = quadrature.composite_nodes(edges, 4)
        mass = (w * density(nodes)).reshape(len(lengths), -1).sum(axis=1)
    return np.maximum(1, np.rint(n_cells * mass / mass.sum()).astype(int))


def _mesh_nodes(edges, counts, density):
    out = []
    for left, right, c in zip(edges[:-1], edges[1:], counts):
        if density is None:
            out.append(np.linspace(left, right, c + 1)[:-1])
        else:
            s = np.linspace(left, right, 4097)
            d = density(s)
            cum = np.concatenate(([0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(s))))
            out.append(np.interp(np.linspace(0.0, cum[-1], c + 1)[:-1], cum, s))
    return np.concatenate(out)


def periodic_meshes(weights, n_fine):
    """Coarse and fine breakpoint-aligned meshes; the fine mesh bisects every
    coarse cell (in the graded coordinate when a density is given)."""
    edges = weights.edges()
    # slivers far below the mesh scale only cost conditioning
    keep = np.concatenate(([True], np.diff(edges) > 1e-9))
    keep[-1] = True
    edges = edges[keep]
    if len(edges) > 2 and edges[-1] - edges[-2] <= 1e-9:
        edges = np.delete(edges, -2)
    counts = _segment_counts(edges, n_fine // 2, weights.density)
    return (_mesh_nodes(edges, counts, weights.density),
            _mesh_nodes(edges, 2 * counts, weights.density))


def assemble(weights, nodes):
    """Stiffness (sparse, periodic) and lumped mass (vector) on ``nodes``.

    The edge conductance is the harmonic mean of ``b`` over the cell divided
    by its length, i.e. ``1 / int_cell (1/b)``; node masses are
    ``int a phi_i`` for the hat functions ``phi_i``.
    """
    n = len(nodes)
    if n < 3:
        raise PreconditionError("periodic mesh needs at least 3 nodes")
    h = np.diff(np.append(nodes, TWO_PI))
    s = 0.5 * (_CELL_X + 1.0)
    pts = nodes[:, None] + h[:, None] * s[None, :]
    ww = 0.5 * h[:, None] * _CELL_W[None, :]
    av = weights.a(pts.ravel()).reshape(pts.shape)
    bv = weights.b(pts.ravel()).reshape(pts.shape)
    cond = 1.0 / np.sum(ww / bv, axis=1)
    m_left = np.sum(ww * av * (1.0 - s), axis=1)
    m_right = np.sum(ww * av * s, axis=1)
    mass = m_left + np.roll(m_right, 1)
    i = np.arange(n)
    j = (i + 1) % n
    rows = np.concatenate((i, j, i, j))
    cols = np.concatenate((i, j, j, i))
    vals = np.concatenate((cond, cond, -cond, -cond))
    K = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return K, mass


def lowest_modes(K, mass, start, tol=1e-13, max_iter=3000):
    """Smallest nonzero eigenpairs of ``K x = lam diag(mass) x``.

    Shift-invert subspace iteration with the constant mode deflated by
    a-weighted mean projection, Rayleigh-Ritz at every step.  Columns of the
    returned block are mass-orthonormal.
    """
    n = len(mass)
    msum = mass.sum()

    def project(X):
        return X - np.outer(np.ones(n), (mass @ X) / msum)

    X = project(np.asarray(start, dtype=float))
    rq = np.einsum("ij,ij->j", X, K @ X) / np.einsum("ij,i,ij->j", X, mass, X)
    shift = 0.01 * float(rq.min())
    lu = splu((K + shift * sp.diags(mass)).tocsc())
    previous = None
    last_change = np.inf
    for _ in range(max_iter):
        Y = project(lu.solve(mass[:, None] * X))
        Kr = Y.T @ (K @ Y)
        Mr = Y.T @ (mass[:, None] * Y)
        lam, V = scipy.linalg.eigh(0.5 * (Kr + Kr.T), 0.5 * (Mr + Mr.T))
        X = Y @ V
        if previous is not None:
            change = float(np.max(np.abs(lam[:2] - previous[:2]) / np.abs(lam[:2])))
            if change <= tol:
                break
            # stagnation at the roundoff floor of an ill-conditioned mesh
            if change <= 1e-10 and change >= 0.5 * last_change:
                break
            last_change = change
        previous = lam
    else:
        raise ConvergenceError("shift-invert subspace iteration did not converge")
    if not lam[0] > 0:
        raise ConvergenceError("no positive eigenvalue found (degenerate weights)")
    return lam, X


def _start_block(nodes):
    return np.column_stack((np.sin(nodes), np.cos(nodes),
                            np.sin(2 * nodes), np.cos(2 * nodes)))


@dataclass
class WirtingerSolution:
    """Best constant with its extremal function and convergence data."""

    C: float
    gamma: float
    theta: np.ndarray
    w: np.ndarray
    basis: np.ndarray
    multiplicity: int
    C_coarse: float
    C_fine: float
    n_coarse: int
    n_fine: int
    error_estimate: float
    eigenvalues: np.ndarray
    mass: np.ndarray = dc_field(repr=False)
    stiffness: object = dc_field(repr=False, default=None)

    def diagnostics(self):
        return {"C_coarse": self.C_coarse, "C_fine": self.C_fine,
                "C_extrapolated": self.C, "n_coarse": self.n_coarse,
                "n_fine": self.n_fine, "error_estimate": self.error_estimate,
                "multiplicity": self.multiplicity}


def best_constant(weights, n_grid=2048, richardson=True):
    """C(a, b) from the smallest nonzero periodic eigenvalue.

    ``n_grid`` is the fine mesh size; the coarse mesh has half as many cells
    and ``C`` is Richardson-extrapolated from the two (second order).
    """
    if n_grid < 64:
        raise PreconditionError("n_grid must be >= 64")
    coarse, fine = periodic_meshes(weights, n_grid)
    Kc, mc = assemble(weights, coarse)
    lam_c, _ = lowest_modes(Kc, mc, _start_block(coarse))
    Kf, mf = assemble(weights, fine)
    lam_f, X = lowest_modes(Kf, mf, _start_block(fine))
    lam = (4.0 * lam_f[0] - lam_c[0]) / 3.0 if richardson else lam_f[0]
    cluster_tol = max(1e-8, 4.0 * abs(lam_f[0] - lam_c[0]) / lam_f[0])
    multiplicity = int(np.sum(np.abs(lam_f - lam_f[0]) <= cluster_tol * lam_f[0]))
    basis = X[:, :multiplicity] / np.sqrt(np.einsum("ij,i,ij->j", X[:, :multiplicity],
                                                    mf, X[:, :multiplicity]))
    w = basis[:, 0].copy()
    if np.dot(w, mf * np.sin(fine)) < 0:
        w = -w
    C = 1.0 / lam
    return WirtingerSolution(
        C=C, gamma=float(np.sqrt(lam)), theta=fine, w=w, basis=basis,
        multiplicity=multiplicity, C_coarse=1.0 / lam_c[0], C_fine=1.0 / lam_f[0],
        n_coarse=len(coarse), n_fine=len(fine),
        error_estimate=abs(C - 1.0 / lam_f[0]), eigenvalues=lam_f,
        mass=mf, stiffness=Kf)


def constrained_rayleigh_minimum(weights, n_grid=64, tol=1e-13, max_iter=50000):
    """Minimise ``w'Kw / w'Mw`` subject to ``sum(M w) = 0`` by projected
    gradient steps with exact line search (2x2 Rayleigh-Ritz on the span of
    the iterate and its projected gradient).  Returns ``(C, nodes, w)`` on the
    same single mesh used by :func:`best_constant`, without extrapolation.
    """
    _, nodes = periodic_meshes(weights, n_grid)
    K, mass = assemble(weights, nodes)
    msum = mass.sum()

    def project(v):
        return v - (mass @ v) / msum

    w = project(np.sin(nodes))
    w /= np.sqrt(w @ (mass * w))
    R = w @ (K @ w)
    for _ in range(max_iter):
        g = project((K @ w - R * mass * w) / mass)
        gn = np.sqrt(g @ (mass * g))
        if gn == 0:
            break
        basis = np.column_stack((w, g / gn))
        Kr = basis.T @ (K @ basis)
        Mr = basis.T @ (mass[:, None] * basis)
        lam, V = scipy.linalg.eigh(Kr, Mr)
        w = basis @ V[:, 0]
        w /= np.sqrt(w @ (mass * w))
        R_new = lam[0]
        if abs(R - R_new) <= tol * R_new:
            R = R_new
            break
        R = R_new
    else:
        raise ConvergenceError("projected gradient descent did not converge")
    return 1.0 / R, nodes, w


# --------------------------------------------------------------------------
# periodic Sturm-Liouville problem -(k2 u')' = gamma^2 k1 u

@dataclass
class SturmLiouvilleMode:
    """Smallest positive exponent gamma with its periodic eigenfunction(s).

    ``functions`` holds one ``(value, derivative)`` callable pair per basis
    vector of the eigenspace (two when the eigenvalue is double).
    """

    gamma: float
    theta: np.ndarray
    values: np.ndarray
    multiplicity: int
    functions: list = dc_field(repr=False, default_factory=list)
    breakpoints: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    method: str = "transfer-matrix"


def _monodromy(lengths, k1, k2, gamma):
    """Product of arc transfer matrices for the state (u, k2 u'); gamma may be
    an array, giving a stack of matrices."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    T = np.broadcast_to(np.eye(2), (len(gamma), 2, 2)).copy()
    for ell, p, q in zip(lengths, k1, k2):
        omega = gamma * np.sqrt(p / q)
        c, s = np.cos(omega * ell), np.sin(omega * ell)
        imp = q * omega
        step = np.empty_like(T)
        step[:, 0, 0] = c
        step[:, 0, 1] = s / imp
        step[:, 1, 0] = -imp * s
        step[:, 1, 1] = c
        T = step @ T
    return T


def _discriminant(lengths, k1, k2, gamma):
    T = _monodromy(lengths, k1, k2, gamma)
    return T[:, 0, 0] + T[:, 1, 1] - 2.0


def _mode_function(starts, lengths, k1, k2, gamma, v0):
    """Exact eigenfunction of the piecewise-constant problem from its
    initial state v0 = (u(0), k2 u'(0))."""
    states = [np.asarray(v0, dtype=float)]
    for ell, p, q in zip(lengths, k1, k2):
        omega = gamma * np.sqrt(p / q)
        c, s = np.cos(omega * ell), np.sin(omega * ell)
        u, f = states[-1]
        states.append(np.array([u * c + f * s / (q * omega), -q * omega * u * s + f * c]))
    states = np.array(states[:-1])
    omegas = gamma * np.sqrt(k1 / k2)

    def local(theta):
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        idx = np.searchsorted(starts, theta, side="right") - 1
        d = theta - starts[idx]
        om = omegas[idx]
        c, s = np.cos(om * d), np.sin(om * d)
        u0, f0 = states[idx, 0], states[idx, 1]
        q = k2[idx]
        value = u0 * c + f0 * s / (q * om)
        deriv = (-q * om * u0 * s + f0 * c) / q
        return value, deriv

    return (lambda th: local(th)[0]), (lambda th: local(th)[1])


def _transfer_matrix_mode(weights, n_samples, n_scan=4000):
    starts, k1, k2 = weights.arcs
    lengths = np.diff(np.append(starts, TWO_PI))
    # a Rayleigh quotient of sin/cos bounds gamma from above
    nodes, w = quadrature.composite_nodes(weights.edges(), 8)
    a_n, b_n = weights.a(nodes), weights.b(nodes)
    trial = []
    for fn, dfn in ((np.sin, np.cos), (np.cos, lambda t: -np.sin(t))):
        u = fn(nodes) - np.sum(w * a_n * fn(nodes)) / np.sum(w * a_n)
        trial.append(np.sum(w * b_n * dfn(nodes) ** 2) / np.sum(w * a_n * u * u))
    g_hi = 1.05 * np.sqrt(min(trial)) + 1e-12
    grid = np.linspace(g_hi / n_scan, g_hi, n_scan)
    D = _discriminant(lengths, k1, k2, grid)

    def disc(g):
        return float(_discriminant(lengths, k1, k2, g)[0])

    candidates = []
    crossing = np.nonzero(D >= 0)[0]
    stop = crossing[0] if crossing.size else len(grid) - 1
    if crossing.size:
        i = crossing[0]
        lo = grid[i - 1] if i > 0 else grid[0] * 0.5
        candidates.append(brentq(disc, lo, grid[i], xtol=1e-15))
    # tangential touches (double eigenvalues) show up as local maxima near 0
    for i in range(1, stop + 1):
        if i + 1 < len(grid) and D[i] >= D[i - 1] and D[i] >= D[i + 1]:
            res = minimize_scalar(lambda g: -disc(g), bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded", options={"xatol": 1e-14})
            if -res.fun > -1e-9:
                candidates.append(float(res.x))
    if not candidates:
        raise ConvergenceError("no periodic eigenvalue below the Rayleigh bound")
    gamma = min(candidates)
    T = _monodromy(lengths, k1, k2, gamma)[0]
    R = T - np.eye(2)
    if np.max(np.abs(R)) < 1e-6:
        vecs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    else:
        _, _, Vt = np.linalg.svd(R)
        vecs = [Vt[-1]]
    functions = [_mode_function(starts, lengths, k1, k2, gamma, v) for v in vecs]
    theta = np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
    return SturmLiouvilleMode(gamma=gamma, theta=theta,
                              values=functions[0][0](theta),
                              multiplicity=len(vecs), functions=functions,
                              breakpoints=starts.copy())


def _interpolant(nodes, values):
    ext_t = np.append(nodes, TWO_PI)
    ext_v = np.append(values, values[0])
    slopes = np.diff(ext_v) / np.diff(ext_t)

    def value(th):
        return np.interp(np.mod(th, TWO_PI), ext_t, ext_v)

    def deriv(th):
        idx = np.clip(np.searchsorted(nodes, np.mod(th, TWO_PI), side="right") - 1,
                      0, len(nodes) - 1)
        return slopes[idx]

    return value, deriv


def sturm_liouville_smallest(k1, k2=None, n_grid=2048):
    """Smallest gamma > 0 with a nontrivial periodic weak solution of
    ``-(k2 u')' = gamma^2 k1 u``.

    Accepts either a :class:`WeightPair` (``a = k1``, ``b = k2``) or the two
    weights packed that way already.  Piecewise-constant weights are solved
    exactly by transfer matrices; other weights fall back to the
    finite-difference solver, in which case ``gamma = C(k1, k2)^(-1/2)``.
    """
    weights = k1 if k2 is None else WeightPair(k1.a, k2.b, np.union1d(
        k1.breakpoints, k2.breakpoints))
    if weights.is_piecewise_constant:
        return _transfer_matrix_mode(weights, n_grid)
    sol = best_constant(weights, n_grid)
    functions = [_interpolant(sol.theta, sol.basis[:, j]) for j in range(sol.multiplicity)]
    return SturmLiouvilleMode(gamma=sol.gamma, theta=sol.theta, values=sol.w,
                              multiplicity=sol.multiplicity, functions=functions,
                              breakpoints=sol.theta.copy(), method="finite-difference")


def fourier_tests(n_tests=32):
    """Smooth periodic test functions: cos(k t) for k < n/2, sin(k t) for k <= n/2."""
    tests = []
    for k in range(n_tests // 2):
        tests.append((lambda t, k=k: np.cos(k * t), lambda t, k=k: -k * np.sin(k * t)))
    for k in range(1, n_tests - n_tests // 2 + 1):
        tests.append((lambda t, k=k: np.sin(k * t), lambda t, k=k: k * np.cos(k * t)))
    return tests


def weak_residual(mode, weights, test_budget=32, panels=16):
    """Normalised weak residual of ``-(k2 u')' = gamma^2 k1 u``:

        max_psi |int k2 u' psi' - gamma^2 int k1 u psi|
                / (||sqrt(k2) u'|| ||sqrt(k2) psi'|| + gamma^2 ||sqrt(k1) u|| ||sqrt(k1) psi||)

    over ``test_budget`` Fourier test functions and every basis function of
    the mode.  Integrals use composite Gauss-Legendre split at the weight and
    mode breakpoints.
    """
    edges = quadrature.split_edges(
        np.concatenate((weights.breakpoints, np.asarray(mode.breakpoints))), 0.0, TWO_PI)
    t, w = quadrature.composite_nodes(edges, panels)
    k1, k2 = weights.a(t), weights.b(t)
    g2 = mode.gamma ** 2
    worst = 0.0
    for value, deriv in mode.functions:
        u, du = value(t), deriv(t)
        nu = np.sqrt(np.sum(w * k2 * du * du))
        nk = np.sqrt(np.sum(w * k1 * u * u))
        for psi, dpsi in fourier_tests(test_budget):
            p, dp = psi(t), dpsi(t)
            r = np.sum(w * k2 * du * dp) - g2 * np.sum(w * k1 * u * p)
            scale = nu * np.sqrt(np.sum(w * k2 * dp * dp)) + g2 * nk * np.sqrt(
                np.sum(w * k1 * p * p))
            worst = max(worst, abs(r) / scale)
    return worst
