"""Symmetric 2x2 coefficient fields A(x) for div(A grad u) = 0 in the plane.

Three field variants are provided:

* :class:`AngularPiecewise` -- values depend on ``arg x`` only, constant on
  angular arcs, optionally conjugated by the rotation ``J(arg x)``;
* :class:`SharpFamily` -- the two-phase family ``A_tau = J K_tau J*``;
* :class:`GridSampled` -- a rectangular lattice of matrices with
  nearest-cell lookup.

Angles are measured in [0, 2pi) from the positive x-axis.  Arcs are
half-open ``[start, end)``, so a boundary ray carries the matrix of the arc
that starts there.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (DomainError, InvalidFieldError, OriginError,
                         PreconditionError)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SymMat2:
    """Symmetric 2x2 matrix ``[[a11, a12], [a12, a22]]``."""

    a11: float
    a12: float
    a22: float

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(float(arr[0, 0]), float(0.5 * (arr[0, 1] + arr[1, 0])),
                   float(arr[1, 1]))

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 1.0)

    def as_array(self):
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a12

    @property
    def trace(self):
        return self.a11 + self.a22

    def eigvalsh(self):
        """Eigenvalues in ascending order."""
        half_tr = 0.5 * self.trace
        disc = np.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return half_tr - disc, half_tr + disc

    def quad(self, xi):
        """The quadratic form <xi, A xi>."""
        x, y = xi
        return self.a11 * x * x + 2.0 * self.a12 * x * y + self.a22 * y * y

    def is_positive_definite(self):
        return self.a11 > 0 and self.det > 0


@dataclass(frozen=True)
class EllipticityBounds:
    """Constants with lambda |xi|^2 <= <xi, A xi> <= Lambda |xi|^2."""

    lam: float
    Lam: float

    def __post_init__(self):
        if not (0 < self.lam <= self.Lam):
            raise InvalidFieldError(
                f"ellipticity bounds must satisfy 0 < lambda <= Lambda, "
                f"got {self.lam}, {self.Lam}")

    @property
    def L(self):
        return self.Lam / self.lam


def rotation(t):
    """The rotation matrix J(t)."""
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def conjugate_P(A, t):
    """P = J*(t) A J(t); its (1,1) entry is <e^{it}, A e^{it}>."""
    c, s = np.cos(t), np.sin(t)
    p11 = A.a11 * c * c + 2 * A.a12 * c * s + A.a22 * s * s
    p22 = A.a11 * s * s - 2 * A.a12 * c * s + A.a22 * c * c
    p12 = (A.a22 - A.a11) * c * s + A.a12 * (c * c - s * s)
    return SymMat2(p11, p12, p22)


def quadratic_form_decomposition_check(B, xi):
    """Both sides of <xi,B xi> = <xi,B e1>^2/b11 + (det B/b11) <xi,e2>^2."""
    if B.a11 == 0:
        raise PreconditionError("decomposition requires b11 != 0")
    x, y = xi
    lhs = B.quad(xi)
    be1 = B.a11 * x + B.a12 * y
    rhs = be1 * be1 / B.a11 + B.det / B.a11 * y * y
    return lhs, rhs


def _rotated_entries(k1, k2, theta):
    """Entries of J(theta) diag(k1, k2) J*(theta), vectorised."""
    c, s = np.cos(theta), np.sin(theta)
    a11 = k1 * c * c + k2 * s * s
    a22 = k1 * s * s + k2 * c * c
    a12 = (k1 - k2) * c * s
    return a11, a12, a22


# --------------------------------------------------------------------------
# domains

@dataclass(frozen=True)
class Disk:
    radius: float = 1.0
    center: tuple = (0.0, 0.0)

    def contains(self, x, y):
        return np.hypot(np.asarray(x) - self.center[0],
                        np.asarray(y) - self.center[1]) < self.radius

    def distance_to_boundary(self, x, y):
        return self.radius - np.hypot(np.asarray(x) - self.center[0],
                                      np.asarray(y) - self.center[1])

    def lattice(self, n):
        xs = self.center[0] + np.linspace(-self.radius, self.radius, n)
        ys = self.center[1] + np.linspace(-self.radius, self.radius, n)
        X, Y = np.meshgrid(xs, ys)
        pts = np.column_stack((X.ravel(), Y.ravel()))
        return pts[self.contains(pts[:, 0], pts[:, 1])]

    def describe(self):
        return {"kind": "disk", "radius": self.radius,
                "center": list(self.center)}


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        return (x > self.x0) & (x < self.x1) & (y > self.y0) & (y < self.y1)

    def distance_to_boundary(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        return np.minimum.reduce([x - self.x0, self.x1 - x,
                                  y - self.y0, self.y1 - y])

    def lattice(self, n):
        xs = np.linspace(self.x0, self.x1, n)
        ys = np.linspace(self.y0, self.y1, n)
        X, Y = np.meshgrid(xs, ys)
        pts = np.column_stack((X.ravel(), Y.ravel()))
        return pts[self.contains(pts[:, 0], pts[:, 1])]

    def describe(self):
        return {"kind": "rect", "bounds": [self.x0, self.y0, self.x1, self.y1]}


# --------------------------------------------------------------------------
# fields

class CoefficientField:
    """Base class.  Subclasses implement :meth:`entries` and :meth:`breakpoints`.

    ``polar`` marks 0-homogeneous fields that depend on ``arg x`` only and are
    undefined at the origin.
    """

    polar = False
    domain = Disk()

    def entries(self, x, y):
        """Vectorised evaluation: returns arrays ``(a11, a12, a22)``."""
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        a11, a12, a22 = self.entries(np.atleast_1d(float(x[0])),
                                     np.atleast_1d(float(x[1])))
        return SymMat2(float(a11[0]), float(a12[0]), float(a22[0]))

    def boundary_angles(self):
        """Angles of the rays across which a polar field jumps."""
        return np.empty(0)

    def breakpoints(self, center, radius):
        """Parameters t in [0, 2pi) where the field restricted to the circle
        ``center + radius e^{it}`` may jump."""
        from .circle import ray_crossings
        return ray_crossings(center, radius, self.boundary_angles())

    def det_on(self, x, y):
        a11, a12, a22 = self.entries(x, y)
        return a11 * a22 - a12 * a12

    def ellipticity_bounds(self, sample_budget=4096):
        raise NotImplementedError

    def is_unit_determinant(self, rtol=1e-12):
        raise NotImplementedError

    def is_isotropic(self, rtol=1e-12):
        raise NotImplementedError


def _check_pd(a11, a12, a22):
    det = a11 * a22 - a12 * a12
    if np.any(a11 <= 0) or np.any(det <= 0):
        raise InvalidFieldError("coefficient matrix is not positive definite")


class AngularPiecewise(CoefficientField):
    """Field constant on angular arcs ``[starts[i], starts[i+1])``.

    On arc i the value is ``J(arg x) diag(k1[i], k2[i]) J*(arg x)`` when
    ``rotate`` is true and ``diag(k1[i], k2[i])`` otherwise.
    """

    polar = True

    def __init__(self, starts, k1, k2, rotate=True, domain=None):
        starts = np.asarray(starts, dtype=float)
        k1 = np.asarray(k1, dtype=float)
        k2 = np.asarray(k2, dtype=float)
        if starts.ndim != 1 or len(starts) == 0:
            raise PreconditionError("at least one arc is required")
        if not (len(starts) == len(k1) == len(k2)):
            raise PreconditionError("starts, k1, k2 must have equal length")
        if starts[0] != 0.0 or np.any(np.diff(starts) <= 0) or starts[-1] >= TWO_PI:
            raise PreconditionError(
                "arc starts must be increasing in [0, 2pi) with the first at 0")
        if np.any(k1 <= 0) or np.any(k2 <= 0):
            raise InvalidFieldError("arc coefficients must be positive")
        self.starts = starts
        self.k1 = k1
        self.k2 = k2
        self.rotate = bool(rotate)
        self.domain = Disk() if domain is None else domain

    @property
    def ends(self):
        return np.append(self.starts[1:], TWO_PI)

    def arc_index(self, theta):
        theta = np.mod(theta, TWO_PI)
        return np.searchsorted(self.starts, theta, side="right") - 1

    def arc_coefficients(self, theta):
        idx = self.arc_index(theta)
        return self.k1[idx], self.k2[idx]

    def entries(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any((x == 0) & (y == 0)):
            raise OriginError("polar field is undefined at the origin")
        theta = np.mod(np.arctan2(y, x), TWO_PI)
        k1, k2 = self.arc_coefficients(theta)
        if self.rotate:
            return _rotated_entries(k1, k2, theta)
        return k1.copy(), np.zeros_like(k1), k2.copy()

    def boundary_angles(self):
        return self.starts.copy()

    def ellipticity_bounds(self, sample_budget=4096):
        vals = np.concatenate((self.k1, self.k2))
        return EllipticityBounds(float(vals.min()), float(vals.max()))

    def arc_dets(self):
        return self.k1 * self.k2

    def is_unit_determinant(self, rtol=1e-12):
        return bool(np.allclose(self.arc_dets(), 1.0, rtol=rtol, atol=0))

    def is_isotropic(self, rtol=1e-12):
        return bool(np.allclose(self.k1, self.k2, rtol=rtol, atol=0))

    def describe(self):
        return {"variant": "angular", "rotate": self.rotate,
                "arcs": [[float(s), float(e), float(a), float(b)] for s, e, a, b
                         in zip(self.starts, self.ends, self.k1, self.k2)]}


def identity_field(domain=None):
    """A single-arc field equal to the identity everywhere."""
    return AngularPiecewise([0.0], [1.0], [1.0], rotate=True, domain=domain)


class SharpFamily(AngularPiecewise):
    """``A_tau = J K_tau J*`` with ``K_tau = Id`` on
    ``[0, pi/(1+M^-tau)) U [pi, pi + pi/(1+M^-tau))`` and
    ``diag(M, M^(1-2 tau))`` elsewhere."""

    def __init__(self, tau, M, domain=None):
        if not (0.0 <= tau <= 1.0):
            raise PreconditionError(f"tau must lie in [0, 1], got {tau}")
        if not M >= 1.0:
            raise PreconditionError(f"M must be >= 1, got {M}")
        self.tau = float(tau)
        self.M = float(M)
        half = np.pi / (1.0 + M ** (-tau))
        k1 = M
        k2 = M ** (1.0 - 2.0 * tau)
        super().__init__([0.0, half, np.pi, np.pi + half],
                         [1.0, k1, 1.0, k1], [1.0, k2, 1.0, k2],
                         rotate=True, domain=domain)

    @property
    def sector_angle(self):
        """``pi / (1 + M^-tau)``, the end of the first identity sector."""
        return self.starts[1]

    def ellipticity_bounds(self, sample_budget=4096):
        vals = [1.0, self.M, self.M ** (1.0 - 2.0 * self.tau)]
        return EllipticityBounds(min(vals), max(vals))

    def describe(self):
        return {"variant": "sharp", "tau": self.tau, "M": self.M}


class GridSampled(CoefficientField):
    """Rectangular lattice of matrices with nearest-cell lookup.

    Cell (i, j) covers ``[x0 + i dx, x0 + (i+1) dx) x [y0 + j dy, y0 + (j+1) dy)``.
    Entry arrays have shape ``(ny, nx)``.
    """

    def __init__(self, x0, y0, dx, dy, a11, a12, a22):
        a11 = np.asarray(a11, dtype=float)
        a12 = np.asarray(a12, dtype=float)
        a22 = np.asarray(a22, dtype=float)
        if not (a11.shape == a12.shape == a22.shape) or a11.ndim != 2:
            raise PreconditionError("entry arrays must share a 2-D shape")
        if dx <= 0 or dy <= 0:
            raise PreconditionError("cell sizes must be positive")
        _check_pd(a11, a12, a22)
        self.ny, self.nx = a11.shape
        self.x0, self.y0, self.dx, self.dy = float(x0), float(y0), float(dx), float(dy)
        self.a11, self.a12, self.a22 = a11, a12, a22
        self.domain = Rect(self.x0, self.y0, self.x0 + self.nx * self.dx,
                           self.y0 + self.ny * self.dy)

    def _cells(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.domain
        inside = (x >= d.x0) & (x <= d.x1) & (y >= d.y0) & (y <= d.y1)
        if not np.all(inside):
            raise DomainError("point outside the sampled grid")
        i = np.clip(np.floor((x - self.x0) / self.dx).astype(int), 0, self.nx - 1)
        j = np.clip(np.floor((y - self.y0) / self.dy).astype(int), 0, self.ny - 1)
        return i, j

    def entries(self, x, y):
        i, j = self._cells(x, y)
        return self.a11[j, i], self.a12[j, i], self.a22[j, i]

    def breakpoints(self, center, radius):
        from .circle import line_crossings
        xs = self.x0 + self.dx * np.arange(1, self.nx)
        ys = self.y0 + self.dy * np.arange(1, self.ny)
        return line_crossings(center, radius, xs, ys)

    def ellipticity_bounds(self, sample_budget=4096):
        if sample_budget < 1:
            raise PreconditionError("sample_budget must be >= 1")
        a11, a12, a22 = (a.ravel() for a in (self.a11, self.a12, self.a22))
        if a11.size > sample_budget:
            idx = np.linspace(0, a11.size - 1, sample_budget).astype(int)
            a11, a12, a22 = a11[idx], a12[idx], a22[idx]
        half_tr = 0.5 * (a11 + a22)
        disc = np.hypot(0.5 * (a11 - a22), a12)
        return EllipticityBounds(float((half_tr - disc).min()),
                                 float((half_tr + disc).max()))

    def is_unit_determinant(self, rtol=1e-12):
        det = self.a11 * self.a22 - self.a12 ** 2
        return bool(np.allclose(det, 1.0, rtol=rtol, atol=0))

    def is_isotropic(self, rtol=1e-12):
        return bool(np.allclose(self.a11, self.a22, rtol=rtol, atol=0)
                    and np.allclose(self.a12, 0.0, atol=rtol * np.abs(self.a11).max()))

    def describe(self):
        return {"variant": "grid", "nx": self.nx, "ny": self.ny,
                "x0": self.x0, "y0": self.y0, "dx": self.dx, "dy": self.dy}


def eval_field(field, x):
    """A(x) as a :class:`SymMat2`."""
    return field.eval(x)


def ellipticity_bounds(field, sample_budget=4096):
    return field.ellipticity_bounds(sample_budget)
