"""Lower bounds on the Hoelder exponent alpha(A) of solutions to div(A grad u) = 0.

All suprema over circles ``S_rho(x) in Omega`` are taken over a finite
:class:`CircleScan`.  A finite scan under-estimates a supremum, so the
reported bounds over-estimate their exact values; the scan resolution is
carried in every report so convergence can be monitored.
"""

from dataclasses import dataclass, field as dc_field, asdict

import numpy as np

from . import quadrature
from .circle import Circle, circle_edges, det_range, f_average
from .exceptions import (EmptyScanError, HolderError, OriginError,
                         PreconditionError)
from .wirtinger import WeightPair, best_constant

TWO_PI = 2.0 * np.pi


def ps_general_bound(L):
    """L^(-1/2), valid for every uniformly elliptic field."""
    if L < 1:
        raise PreconditionError("ellipticity ratio must be >= 1")
    return L ** -0.5


def ps_isotropic_bound(L):
    """(4/pi) arctan(L^(-1/2)), valid for isotropic fields a(x) Id."""
    if L < 1:
        raise PreconditionError("ellipticity ratio must be >= 1")
    return 4.0 / np.pi * np.arctan(L ** -0.5)


def arctan_factor(ratio):
    """(4/pi) arctan(ratio^(1/4)) for a determinant ratio inf/sup in (0, 1]."""
    return 4.0 / np.pi * np.arctan(np.asarray(ratio, dtype=float) ** 0.25)


# --------------------------------------------------------------------------
# circle scans

@dataclass
class CircleScan:
    """Centres on a lattice over the domain and, per centre, the radius
    ladder ``rho_k = d_x 2^-k`` (k = 1..n_radii), ``d_x`` the distance to the
    boundary."""

    x: np.ndarray
    y: np.ndarray
    rho: np.ndarray
    n_centers: int = 0
    n_radii: int = 0

    @classmethod
    def lattice(cls, domain, n_centers=33, n_radii=12):
        if n_centers < 1 or n_radii < 1:
            raise PreconditionError("scan needs at least one centre and one radius")
        pts = domain.lattice(n_centers)
        d = domain.distance_to_boundary(pts[:, 0], pts[:, 1])
        keep = d > 0
        pts, d = pts[keep], d[keep]
        k = 2.0 ** -np.arange(1, n_radii + 1)
        rho = (d[:, None] * k[None, :]).ravel()
        xs = np.repeat(pts[:, 0], n_radii)
        ys = np.repeat(pts[:, 1], n_radii)
        return cls(xs, ys, rho, n_centers, n_radii)

    @classmethod
    def from_circles(cls, circles):
        arr = np.array([(c.center[0], c.center[1], c.radius) for c in circles], dtype=float)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], 0, 0)

    def __len__(self):
        return len(self.rho)

    def circles(self):
        for x, y, r in zip(self.x, self.y, self.rho):
            yield Circle((x, y), r)

    def describe(self):
        return {"n_centers": self.n_centers, "n_radii": self.n_radii,
                "n_circles": len(self)}


@dataclass
class ScanTable:
    """Per-circle values of a scan; ``circle_bound`` is the circle's own
    exponent bound and the reported bound is its minimum."""

    x: np.ndarray
    y: np.ndarray
    rho: np.ndarray
    f: np.ndarray
    det_ratio: np.ndarray
    circle_bound: np.ndarray
    skipped: int = 0

    def rows(self):
        return zip(self.x, self.y, self.rho, self.f, self.det_ratio, self.circle_bound)


def _argmin_lexicographic(values, x, y, rho, rtol=1e-12):
    """Index of the minimum; near-ties within rtol go to the smallest (x, y, rho)."""
    best = np.min(values)
    near = np.nonzero(values <= best + rtol * abs(best))[0]
    order = np.lexsort((rho[near], y[near], x[near]))
    return int(near[order[0]])


def scan_table(field, scan, tol=1e-13, min_nodes=512):
    """f, det ratio and per-circle bound on every admissible circle.

    Circles through the origin of a polar field are skipped (measure zero
    set of configurations) and counted.
    """
    rows = []
    skipped = 0
    for circle in scan.circles():
        if field.polar and circle.passes_through_origin():
            skipped += 1
            continue
        f = f_average(field, circle, tol, min_nodes=min_nodes)
        lo, hi = det_range(field, circle)
        ratio = lo / hi
        rows.append((circle.center[0], circle.center[1], circle.radius, f, ratio,
                     arctan_factor(ratio) / f))
    if not rows:
        raise EmptyScanError("scan produced no admissible circle")
    arr = np.array(rows)
    return ScanTable(*arr.T, skipped=skipped)


@dataclass
class BetaResult:
    value: float
    sup_quotient: float
    circle: tuple
    table: ScanTable = dc_field(repr=False)


def beta(field, scan, tol=1e-13, min_nodes=512):
    """beta(A) = (sup over circles of f / ((4/pi) arctan((inf det / sup det)^(1/4))))^-1."""
    table = scan_table(field, scan, tol, min_nodes)
    i = _argmin_lexicographic(table.circle_bound, table.x, table.y, table.rho)
    value = float(table.circle_bound[i])
    return BetaResult(value, 1.0 / value,
                      (float(table.x[i]), float(table.y[i]), float(table.rho[i])), table)


def unitdet_bound(field, scan, tol=1e-13, min_nodes=512):
    """(sup over circles of the mean of <n, A n>)^-1 for det A = 1."""
    if not field.is_unit_determinant():
        raise PreconditionError("unit-determinant bound needs det A = 1")
    sup = 0.0
    for circle in scan.circles():
        if field.polar and circle.passes_through_origin():
            continue
        sup = max(sup, f_average(field, circle, tol, min_nodes=min_nodes))
    if sup == 0.0:
        raise EmptyScanError("scan produced no admissible circle")
    return 1.0 / sup


# --------------------------------------------------------------------------
# best constants per circle

def circle_weights(field, circle):
    """Weights a(t) = <e^{it}, A e^{it}> and b(t) = det A / a(t) on the circle.

    The mesh density ``1 + |d theta/dt|`` concentrates nodes where the
    circle passes close to the origin of a polar field.
    """
    if field.polar and circle.passes_through_origin():
        raise OriginError("circle passes through the origin of a polar field")
    cx, cy = circle.center
    rho = circle.radius

    def parts(t):
        px, py = circle.points(t)
        a11, a12, a22 = field.entries(px, py)
        c, s = np.cos(t), np.sin(t)
        p11 = a11 * c * c + 2 * a12 * c * s + a22 * s * s
        return p11, a11 * a22 - a12 * a12

    def a(t):
        return parts(t)[0]

    def b(t):
        p11, det = parts(t)
        return det / p11

    density = None
    if field.polar:
        def density(t):
            num = rho * (rho + cx * np.cos(t) + cy * np.sin(t))
            den = (cx * cx + cy * cy - rho * rho) + 2 * rho * (rho + cx * np.cos(t)
                                                               + cy * np.sin(t))
            return 1.0 + np.abs(num / den)

    return WeightPair.from_functions(a, b, breakpoints=circle_edges(field, circle)[1:-1],
                                     ab_range=det_range(field, circle), density=density)


@dataclass
class Beta0Result:
    value: float
    sup_C: float
    circle: tuple
    error_estimate: float
    constants: np.ndarray = dc_field(repr=False)


def beta0(field, scan, n_grid=512):
    """beta_0(A) = (sup over circles of C_A(x, rho)^(1/2))^-1 with C_A the best
    Wirtinger constant of the circle weights.

    ``error_estimate`` propagates the eigen-solver's Richardson estimate at
    the minimising circle through C -> C^(-1/2).
    """
    xs, ys, rs, cs, errs = [], [], [], [], []
    for circle in scan.circles():
        if field.polar and circle.passes_through_origin():
            continue
        try:
            sol = best_constant(circle_weights(field, circle), n_grid)
        except HolderError as err:
            raise type(err)(f"{err} (circle centre={circle.center}, "
                            f"radius={circle.radius})") from err
        xs.append(circle.center[0])
        ys.append(circle.center[1])
        rs.append(circle.radius)
        cs.append(sol.C)
        errs.append(sol.error_estimate)
    if not cs:
        raise EmptyScanError("scan produced no admissible circle")
    cs = np.array(cs)
    bounds = cs ** -0.5
    i = _argmin_lexicographic(bounds, np.array(xs), np.array(ys), np.array(rs))
    err = 0.5 * cs[i] ** -1.5 * errs[i]
    return Beta0Result(float(bounds[i]), float(cs[i]),
                       (float(xs[i]), float(ys[i]), float(rs[i])), float(err), cs)


# --------------------------------------------------------------------------
# report

@dataclass
class BoundsReport:
    lam: float
    Lam: float
    L: float
    ps_general: float
    ps_isotropic: float
    unitdet: float
    beta: float
    beta0: float
    sup_circle: tuple
    beta0_circle: tuple
    scan: dict
    n_circles: int
    n_skipped: int

    def to_dict(self):
        return asdict(self)


def compute_bounds(field, scan, with_beta0=True, beta0_scan=None, n_grid=512,
                   tol=1e-13, min_nodes=512):
    """All bounds for ``field`` on ``scan``.

    ``ps_isotropic`` is filled only for isotropic fields and ``unitdet`` only
    for unit-determinant fields.  ``beta0_scan`` (default: ``scan``) can be
    coarser since each circle costs an eigenvalue solve.
    """
    ell = field.ellipticity_bounds()
    b = beta(field, scan, tol, min_nodes)
    report = BoundsReport(
        lam=ell.lam, Lam=ell.Lam, L=ell.L,
        ps_general=ps_general_bound(ell.L),
        ps_isotropic=ps_isotropic_bound(ell.L) if field.is_isotropic() else None,
        unitdet=unitdet_bound(field, scan, tol, min_nodes) if field.is_unit_determinant() else None,
        beta=b.value, beta0=None, sup_circle=b.circle, beta0_circle=None,
        scan=scan.describe(), n_circles=len(b.table.rho), n_skipped=b.table.skipped)
    if with_beta0:
        b0 = beta0(field, beta0_scan or scan, n_grid)
        report.beta0 = b0.value
        report.beta0_circle = b0.circle
    return report, b.table


# --------------------------------------------------------------------------
# explicit homogeneous solutions, energy decay and empirical exponents

@dataclass
class HomogeneousSolution:
    """u = r^degree W(theta) about the origin, with W and W' vectorised."""

    degree: float
    profile: object
    profile_derivative: object
    breakpoints: np.ndarray = dc_field(default_factory=lambda: np.empty(0))

    @classmethod
    def linear(cls, angle=0.0):
        """u(x) = <x, e^{i angle}>."""
        return cls(1.0, lambda th: np.cos(th - angle), lambda th: -np.sin(th - angle))

    def value(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        th = np.mod(np.arctan2(y, x), TWO_PI)
        return np.where(r > 0, r ** self.degree * self.profile(th), 0.0)

    def gradient(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        if np.any(r == 0):
            raise OriginError("gradient of a homogeneous solution at the origin")
        th = np.mod(np.arctan2(y, x), TWO_PI)
        ur = self.degree * r ** (self.degree - 1) * self.profile(th)
        ut = r ** (self.degree - 1) * self.profile_derivative(th)
        c, s = np.cos(th), np.sin(th)
        return ur * c - ut * s, ur * s + ut * c


def _unit_energy(u, field, theta):
    """<grad u, A grad u> at the unit-radius point of angle theta."""
    x, y = np.cos(theta), np.sin(theta)
    gx, gy = u.gradient(x, y)
    a11, a12, a22 = field.entries(x, y)
    return a11 * gx * gx + 2 * a12 * gx * gy + a22 * gy * gy


def dirichlet_energy(u, field, center, rho, tol=1e-12):
    """g_x(rho) = int_{B_rho(x)} <grad u, A grad u> for a homogeneous u and a
    0-homogeneous field, integrating the radial factor r^(2 gamma - 1) exactly
    in polar coordinates about the origin."""
    if not field.polar:
        raise PreconditionError("energy quadrature needs a 0-homogeneous field")
    g = u.degree
    cx, cy = float(center[0]), float(center[1])
    d = np.hypot(cx, cy)
    angles = np.concatenate((field.boundary_angles(), np.asarray(u.breakpoints)))

    def radial(r_lo, r_hi):
        return (r_hi ** (2 * g) - r_lo ** (2 * g)) / (2 * g)

    if d < rho * (1 - 1e-14):
        def integrand(th):
            p = cx * np.cos(th) + cy * np.sin(th)
            R = p + np.sqrt(p * p - d * d + rho * rho)
            return _unit_energy(u, field, th) * radial(0.0, R)
        value, _ = quadrature.integrate(integrand, 0.0, TWO_PI, np.mod(angles, TWO_PI),
                                        tol=tol)
        return value

    theta_c = np.arctan2(cy, cx)
    if d <= rho * (1 + 1e-14):
        # origin on the circle: the disc is seen under a half-plane of angles
        def integrand(th):
            p = np.cos(th - theta_c) * d
            return _unit_energy(u, field, th) * radial(0.0, np.maximum(2 * p, 0.0))
        rel = np.mod(angles - theta_c + np.pi, TWO_PI) - np.pi
        value, _ = quadrature.integrate(integrand, theta_c - np.pi / 2,
                                        theta_c + np.pi / 2, theta_c + rel, tol=tol)
        return value

    # origin outside: sin(theta - theta_c) = (rho/d) sin(phi), phi in [-pi/2, pi/2]
    k = rho / d

    def integrand(phi):
        s = k * np.sin(phi)
        rel = np.arcsin(s)
        cos_rel = np.sqrt(1.0 - s * s)
        r_mid = d * cos_rel
        half = rho * np.cos(phi)
        jac = k * np.cos(phi) / cos_rel
        return _unit_energy(u, field, theta_c + rel) * radial(r_mid - half, r_mid + half) * jac

    rel = np.mod(angles - theta_c + np.pi, TWO_PI) - np.pi
    inside = np.abs(np.sin(rel)) < k
    inside &= np.cos(rel) > 0
    breaks = np.arcsin(np.sin(rel[inside]) / k)
    value, _ = quadrature.integrate(integrand, -np.pi / 2, np.pi / 2, breaks, tol=tol)
    return value


@dataclass
class DecayVerdict:
    radii: np.ndarray
    energies: np.ndarray
    normalized: np.ndarray
    exponent: float
    nondecreasing: bool
    max_relative_drop: float
    relative_spread: float


def energy_decay_check(u, field, center, radii, beta0, rtol=1e-6):
    """Check that rho^(-2 beta0) g_x(rho) is non-decreasing along ``radii``."""
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise PreconditionError("radii must be increasing")
    energies = np.array([dirichlet_energy(u, field, center, r) for r in radii])
    normalized = radii ** (-2 * beta0) * energies
    drops = (normalized[:-1] - normalized[1:]) / normalized[:-1]
    worst = float(max(0.0, drops.max())) if len(drops) else 0.0
    spread = float((normalized.max() - normalized.min()) / normalized.max())
    return DecayVerdict(radii, energies, normalized, beta0, worst <= rtol, worst, spread)


def oscillation(u, center, rho, n_radial=33, n_angles=721):
    """max - min of u sampled on a polar grid filling the closed disc."""
    r = rho * np.linspace(0.0, 1.0, n_radial)
    th = np.linspace(0.0, TWO_PI, n_angles, endpoint=False)
    angles = np.concatenate((th, np.mod(np.asarray(u.breakpoints), TWO_PI)))
    R, T = np.meshgrid(r, angles)
    vals = u.value(center[0] + R * np.cos(T), center[1] + R * np.sin(T))
    return float(vals.max() - vals.min())


def empirical_holder_exponent(u, fit_radii, center=(0.0, 0.0)):
    """Least-squares slope of log(osc_{B_rho} u) against log(rho)."""
    fit_radii = np.asarray(fit_radii, dtype=float)
    if fit_radii.max() / fit_radii.min() < 1e3 * (1 - 1e-12):
        raise PreconditionError("radius ladder must span at least 3 decades")
    osc = np.array([oscillation(u, center, r) for r in fit_radii])
    if np.any(osc <= 0):
        raise PreconditionError("zero oscillation: exponent fit is degenerate")
    slope, _ = np.polyfit(np.log(fit_radii), np.log(osc), 1)
    return float(slope)
