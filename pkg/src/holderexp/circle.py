"""Geometry and quadrature on circles S_rho(x) = {x + rho e^{it}}."""

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import quadrature
from .exceptions import OriginError, PreconditionError

TWO_PI = 2.0 * np.pi
_ORIGIN_RTOL = 1e-14


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise PreconditionError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "center",
                           (float(self.center[0]), float(self.center[1])))

    def points(self, t):
        t = np.asarray(t, dtype=float)
        return (self.center[0] + self.radius * np.cos(t),
                self.center[1] + self.radius * np.sin(t))

    @property
    def center_norm(self):
        return float(np.hypot(*self.center))

    def passes_through_origin(self):
        return abs(self.center_norm - self.radius) <= _ORIGIN_RTOL * self.radius

    def encloses_origin(self):
        return self.center_norm < self.radius


@dataclass(frozen=True)
class Cone:
    """Two-sided sector ``[phi1, phi2) U [pi + phi1, pi + phi2)``."""

    phi1: float
    phi2: float

    def __post_init__(self):
        if not (0.0 <= self.phi1 < self.phi2 <= self.phi1 + np.pi):
            raise PreconditionError("cone needs 0 <= phi1 < phi2 <= phi1 + pi")

    @property
    def aperture(self):
        return self.phi2 - self.phi1

    def boundary_angles(self):
        return np.array([self.phi1, self.phi2, self.phi1 + np.pi, self.phi2 + np.pi])

    def contains_angle(self, theta):
        return np.mod(np.asarray(theta) - self.phi1, np.pi) < self.aperture


def ray_crossings(center, radius, angles):
    """Parameters t in [0, 2pi) at which the circle meets the rays
    ``{s e^{i phi} : s > 0}`` for each phi in ``angles``.

    Tangent contacts are returned once; they split the circle into a
    zero-length piece, which is harmless.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size == 0:
        return np.empty(0)
    cx, cy = float(center[0]), float(center[1])
    ux, uy = np.cos(angles), np.sin(angles)
    proj = ux * cx + uy * cy
    disc = proj * proj - (cx * cx + cy * cy) + radius * radius
    # tangency up to roundoff: one contact point, not a sliver of the other side
    disc = np.where(np.abs(disc) <= 1e-13 * radius * radius, 0.0, disc)
    ok = disc >= 0
    root = np.sqrt(np.where(ok, disc, 0.0))
    s = np.concatenate((proj + root, proj - root))
    ux2, uy2 = np.tile(ux, 2), np.tile(uy, 2)
    keep = np.tile(ok, 2) & (s > 0)
    px, py = s[keep] * ux2[keep] - cx, s[keep] * uy2[keep] - cy
    return np.unique(np.mod(np.arctan2(py, px), TWO_PI))


def line_crossings(center, radius, xs, ys):
    """Parameters where the circle crosses vertical lines ``x = xs`` and
    horizontal lines ``y = ys``."""
    cx, cy = float(center[0]), float(center[1])
    out = []
    cu = (np.asarray(xs, dtype=float) - cx) / radius
    cu = cu[np.abs(cu) <= 1]
    a = np.arccos(cu)
    out += [a, -a]
    su = (np.asarray(ys, dtype=float) - cy) / radius
    su = su[np.abs(su) <= 1]
    b = np.arcsin(su)
    out += [b, np.pi - b]
    return np.unique(np.mod(np.concatenate(out), TWO_PI))


def circle_edges(field, circle):
    """Breakpoints of the field along the circle, plus the parameter of the
    point nearest to the origin for polar fields (where the angle map varies
    fastest).  Returned sorted, within [0, 2pi]."""
    edges = [np.asarray(field.breakpoints(circle.center, circle.radius))]
    if field.polar and circle.center_norm > 0:
        edges.append([np.mod(np.arctan2(-circle.center[1], -circle.center[0]), TWO_PI)])
    return quadrature.split_edges(np.concatenate(edges), 0.0, TWO_PI)


def _check_polar_circle(field, circle):
    if field.polar and circle.passes_through_origin():
        raise OriginError(
            "circle passes through the origin where the polar field is "
            "undefined; perturb the radius")


# --------------------------------------------------------------------------
# angle trace

@dataclass
class AngleTrace:
    t: np.ndarray
    theta: np.ndarray
    h: np.ndarray
    winding: int = dc_field(default=0)


def _h_values(cx, cy, radius, t):
    """cos^2(arg(x + rho e^{it}) - t), extended by continuity at the origin."""
    num = cx * np.cos(t) + cy * np.sin(t) + radius
    # |x + rho e^{it}|^2 written so that |x| = rho gives h = num / (2 rho)
    den = (cx * cx + cy * cy - radius * radius) + 2.0 * radius * num
    with np.errstate(invalid="ignore", divide="ignore"):
        h = num * num / den
    return np.clip(np.where(den > 0, h, 0.0), 0.0, 1.0)


def angle_trace(circle, n_angles=4096):
    """theta(t) = arg(x + rho e^{it}) lifted to a continuous branch, with
    h(t) = cos^2(theta(t) - t)."""
    if n_angles < 16:
        raise PreconditionError("n_angles must be >= 16")
    if circle.passes_through_origin():
        raise OriginError("angle trace undefined: circle passes through the origin")
    cx, cy = circle.center
    t_full = np.linspace(0.0, TWO_PI, n_angles + 1)
    zx, zy = circle.points(t_full)
    theta = np.unwrap(np.arctan2(zy, zx))
    if np.max(np.abs(np.diff(theta))) > np.pi / 2:
        raise PreconditionError(
            "angle trace under-resolved near the origin; increase n_angles")
    winding = int(np.rint((theta[-1] - theta[0]) / TWO_PI))
    h = _h_values(cx, cy, circle.radius, t_full[:-1])
    return AngleTrace(t_full[:-1], theta[:-1], h, winding)


# --------------------------------------------------------------------------
# normalised flux average

def f_integrand(field, circle, t):
    """<e^{it}, A e^{it}> / sqrt(det A) at x + rho e^{it}.

    For rotated angular fields this uses the closed form
    ``sqrt(k1/k2) cos^2(theta - t) + sqrt(k2/k1) sin^2(theta - t)``.
    """
    t = np.asarray(t, dtype=float)
    px, py = circle.points(t)
    if field.polar and getattr(field, "rotate", False):
        theta = np.mod(np.arctan2(py, px), TWO_PI)
        k1, k2 = field.arc_coefficients(theta)
        h = _h_values(circle.center[0], circle.center[1], circle.radius, t)
        r = np.sqrt(k1 / k2)
        return r * h + (1.0 - h) / r
    return f_integrand_direct(field, circle, t)


def f_integrand_direct(field, circle, t):
    """Same integrand by direct evaluation of the matrix field."""
    t = np.asarray(t, dtype=float)
    px, py = circle.points(t)
    a11, a12, a22 = field.entries(px, py)
    c, s = np.cos(t), np.sin(t)
    p11 = a11 * c * c + 2 * a12 * c * s + a22 * s * s
    return p11 / np.sqrt(a11 * a22 - a12 * a12)


def f_average(field, circle, tol=1e-13, direct=False, min_nodes=512):
    """(1/2pi) int_0^{2pi} <e^{it}, A e^{it}> / sqrt(det A) dt over the circle.

    ``min_nodes`` sets the starting resolution of the adaptive rule.
    """
    _check_polar_circle(field, circle)
    integrand = f_integrand_direct if direct else f_integrand
    value, _ = quadrature.integrate(lambda t: integrand(field, circle, t),
                                    0.0, TWO_PI, circle_edges(field, circle),
                                    tol=tol, min_panels=max(1, min_nodes // 16))
    return value / TWO_PI


def f_homogeneity_check(field, x, rho, tol=1e-13):
    """Return ``(f(x, rho), f(x/rho, 1))`` for a 0-homogeneous field."""
    if not field.polar:
        raise PreconditionError("homogeneity check needs a 0-homogeneous field")
    x = np.asarray(x, dtype=float)
    return (f_average(field, Circle(tuple(x), rho), tol),
            f_average(field, Circle(tuple(x / rho), 1.0), tol))


def det_range(field, circle):
    """Essential inf and sup of det A on the circle.

    Exact for fields whose determinant is piecewise constant between
    breakpoints (all variants here): one evaluation per piece.
    """
    _check_polar_circle(field, circle)
    edges = quadrature.split_edges(
        field.breakpoints(circle.center, circle.radius), 0.0, TWO_PI)
    mids = 0.5 * (edges[:-1] + edges[1:])
    px, py = circle.points(mids)
    det = field.det_on(px, py)
    return float(det.min()), float(det.max())


# --------------------------------------------------------------------------
# cone and level sets

def cone_arc_measure(cone, x, rho):
    """Arc length of S_rho(x) inside the two-sided cone, from the closed-form
    ray-circle intersections."""
    if not rho > 0:
        raise PreconditionError("rho must be positive")
    edges = quadrature.split_edges(ray_crossings(x, rho, cone.boundary_angles()),
                                   0.0, TWO_PI)
    mids = 0.5 * (edges[:-1] + edges[1:])
    px = x[0] + rho * np.cos(mids)
    py = x[1] + rho * np.sin(mids)
    inside = cone.contains_angle(np.mod(np.arctan2(py, px), TWO_PI))
    return float(rho * np.diff(edges)[inside].sum())


def level_set_measure(x, k, n_angles=4096):
    """|{t in [0, 2pi) : h(t) <= k}| on the unit circle centred at x, |x| >= 1.

    Roots of h - k are bracketed on a uniform grid and refined with Brent's
    method; sampled near-tangencies are checked with a bounded minimiser so
    that close root pairs are not lost.
    """
    x = (float(x[0]), float(x[1]))
    if np.hypot(*x) < 1.0 - 1e-14:
        raise PreconditionError("level-set law is only asserted for |x| >= 1")
    if k <= 0:
        return 0.0
    if k >= 1:
        return TWO_PI

    def g(t):
        return _h_values(x[0], x[1], 1.0, t) - k

    t = np.linspace(0.0, TWO_PI, n_angles + 1)
    gv = g(t)
    roots = []
    for i in np.nonzero(np.sign(gv[:-1]) * np.sign(gv[1:]) < 0)[0]:
        roots.append(brentq(g, t[i], t[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    roots += [float(t[i]) for i in np.nonzero(gv == 0)[0]]
    # near-tangent extrema: sampled values on one side, true extremum across
    inner = gv[1:-1]
    is_min = (inner < gv[:-2]) & (inner <= gv[2:]) & (inner > 0) & (inner < 1e-2)
    is_max = (inner > gv[:-2]) & (inner >= gv[2:]) & (inner < 0) & (inner > -1e-2)
    for i in np.nonzero(is_min | is_max)[0] + 1:
        lo, hi = t[i - 1], t[i + 1]
        if gv[i] > 0:
            res = minimize_scalar(g, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-14})
            if res.fun < 0:
                roots += [brentq(g, lo, res.x), brentq(g, res.x, hi)]
        else:
            res = minimize_scalar(lambda s: -g(s), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-14})
            if -res.fun > 0:
                roots += [brentq(g, lo, res.x), brentq(g, res.x, hi)]
    edges = quadrature.split_edges(roots, 0.0, TWO_PI)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return float(np.diff(edges)[g(mids) <= 0].sum())
