"""The hyperbolic plane in the hyperboloid model.

Points are ``(x1, x2, x0)`` with ``x1**2 + x2**2 - x0**2 = -1`` and
``x0 > 0``.  Distances are evaluated through polar coordinates about the
origin ``o = (0, 0, 1)``,

    sinh^2(d/2) = sinh^2((r - r')/2) + sinh(r) sinh(r') sin^2((t - t')/2),

which avoids the cancellation of ``arccosh(-<x, y>)`` far from ``o``.
"""

from dataclasses import dataclass
from math import ceil, pi, tau

import numpy as np
from scipy.spatial import cKDTree

from ..errors import (
    DegeneratePairError,
    DegenerateSegmentError,
    DomainError,
    ModelMismatchError,
)
from .base import DEFAULT_CAP, Sample, check_cap, greedy_order, region_bounds

ANGLE_TOL = 1e-12


def minkowski(a, b):
    """Bilinear form ``a1 b1 + a2 b2 - a0 b0`` along the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


def lift(x1, x2):
    """Hyperboloid point above ``(x1, x2)``."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return np.stack([x1, x2, np.sqrt(1.0 + x1 * x1 + x2 * x2)], axis=-1)


def polar(X):
    """Radius and angle about ``o`` of hyperboloid coordinates ``X``."""
    X = np.asarray(X, dtype=float)
    rho = np.hypot(X[..., 0], X[..., 1])
    return np.arcsinh(rho), np.arctan2(X[..., 1], X[..., 0])


def polar_distance(r1, t1, r2, t2):
    """Hyperbolic distance between points given in polar coordinates."""
    s = np.sinh((r1 - r2) / 2) ** 2 + np.sinh(r1) * np.sinh(r2) * np.sin((t1 - t2) / 2) ** 2
    return 2 * np.arcsinh(np.sqrt(s))


def from_polar(r, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sh = np.sinh(r)
    return np.stack([sh * np.cos(theta), sh * np.sin(theta), np.cosh(r)], axis=-1)


def _ell(theta):
    return np.array([np.cos(theta), np.sin(theta), 1.0])


def _ell_pairing(theta, x):
    """``-<l_theta, x>`` evaluated stably from the polar form of ``x``."""
    r, phi = polar(x)
    return np.exp(-r) + 2 * np.sinh(r) * np.sin((theta - phi) / 2) ** 2


@dataclass(frozen=True)
class HypPoint:
    """Point of the hyperboloid; renormalized on construction."""

    coords: tuple

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise DomainError("hyperboloid points have three finite coordinates")
        object.__setattr__(self, "coords", tuple(float(v) for v in lift(c[0], c[1])))

    @property
    def array(self):
        return np.array(self.coords)


ORIGIN = HypPoint((0.0, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class IdealPoint:
    """Point ``theta`` of the circle at infinity, normalized to ``[0, 2 pi)``."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % tau)

    def __eq__(self, other):
        if not isinstance(other, IdealPoint):
            return NotImplemented
        d = abs(self.theta - other.theta) % tau
        return min(d, tau - d) <= ANGLE_TOL

    def __hash__(self):
        return 0


def angle_gap(a, b):
    """Circular distance between two angles."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % tau
    return np.minimum(d, tau - d)


@dataclass(frozen=True, eq=False)
class HypLine:
    """Unit speed geodesic ``t -> p cosh t + v sinh t``."""

    p: tuple
    v: tuple

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        v = np.asarray(self.v, dtype=float)
        p = lift(p[0], p[1])
        v = v + minkowski(v, p) * p
        v = v / np.sqrt(minkowski(v, v))
        object.__setattr__(self, "p", tuple(p))
        object.__setattr__(self, "v", tuple(v))

    def __call__(self, t):
        return self.eval(t)

    def coords(self, s):
        s = np.asarray(s, dtype=float)[..., None]
        X = np.cosh(s) * np.asarray(self.p) + np.sinh(s) * np.asarray(self.v)
        return lift(X[..., 0], X[..., 1])

    def eval(self, t):
        return HypPoint(tuple(self.coords(float(t))))

    def shifted(self, t):
        X = self.coords(float(t))
        V = np.sinh(t) * np.asarray(self.p) + np.cosh(t) * np.asarray(self.v)
        return HypLine(tuple(X), tuple(V))

    def trace(self, s):
        return polar(self.coords(s))

    @property
    def plus(self):
        e = np.asarray(self.p) + np.asarray(self.v)
        return IdealPoint(np.arctan2(e[1], e[0]))

    @property
    def minus(self):
        e = np.asarray(self.p) - np.asarray(self.v)
        return IdealPoint(np.arctan2(e[1], e[0]))


class HyperbolicPlane:
    """The hyperbolic plane with basepoint ``o = (0, 0, 1)``."""

    kind = "hyperbolic"
    approximate = False

    def __init__(self, packing_params=None, delta_hint=np.log(2.0), cap=DEFAULT_CAP):
        self.packing_params = packing_params
        self.delta_hint = None if delta_hint is None else float(delta_hint)
        self.cap = int(cap)
        self.basepoint = ORIGIN

    def __repr__(self):
        return "HyperbolicPlane()"

    def __eq__(self, other):
        return isinstance(other, HyperbolicPlane)

    def __hash__(self):
        return hash("hyperbolic")

    # -- construction ------------------------------------------------------

    def point(self, x1, x2, x0=None):
        return HypPoint((x1, x2, 0.0 if x0 is None else x0))

    def polar_point(self, r, theta):
        return HypPoint(tuple(from_polar(r, theta)))

    def ideal(self, theta):
        return IdealPoint(theta)

    def check_point(self, x):
        if not isinstance(x, HypPoint):
            raise ModelMismatchError(f"{x!r} is not a hyperboloid point")
        return x

    def check_end(self, z):
        if not isinstance(z, IdealPoint):
            raise ModelMismatchError(f"{z!r} is not an ideal point")
        return z

    def check_line(self, g):
        if not isinstance(g, HypLine):
            raise ModelMismatchError(f"{g!r} is not a hyperbolic line")
        return g

    # -- metric ------------------------------------------------------------

    def distance(self, x, y):
        self.check_point(x)
        self.check_point(y)
        r1, t1 = polar(x.coords)
        r2, t2 = polar(y.coords)
        return float(polar_distance(r1, t1, r2, t2))

    def gromov_product(self, x, y, z):
        return (self.distance(x, y) + self.distance(x, z) - self.distance(y, z)) / 2

    def _tangent(self, x, y):
        X, Y = x.array, y.array
        d = self.distance(x, y)
        v = Y + minkowski(X, Y) * X
        n = np.sqrt(max(minkowski(v, v), 0.0))
        return v / n, d

    def bicombing(self, x, y, t):
        if not 0 <= t <= 1:
            raise DomainError("t must lie in [0, 1]")
        self.check_point(x)
        self.check_point(y)
        if t == 0 or x == y:
            return x
        if t == 1:
            return y
        # the two-point form needs no normalization, which loses digits far from o
        d = self.distance(x, y)
        a, b = np.sinh((1 - t) * d), np.sinh(t * d)
        return HypPoint(tuple((a * x.array + b * y.array) / np.sinh(d)))

    def extend_to_line(self, x, y):
        self.check_point(x)
        self.check_point(y)
        if self.distance(x, y) == 0:
            raise DegenerateSegmentError("cannot extend a degenerate segment")
        v, _ = self._tangent(x, y)
        return HypLine(x.coords, tuple(v))

    def line_through(self, p, direction):
        """Line with ``line(0) = p`` leaving ``p`` at angle ``direction``."""
        e_r, e_phi = self._frame(p.array)
        v = np.cos(direction) * e_r + np.sin(direction) * e_phi
        return HypLine(p.coords, tuple(v))

    def line_from_boundary_pair(self, zminus, zplus):
        zm = zminus if isinstance(zminus, IdealPoint) else IdealPoint(zminus)
        zp = zplus if isinstance(zplus, IdealPoint) else IdealPoint(zplus)
        if zm == zp:
            raise DegeneratePairError("boundary points must differ")
        lp, lm = _ell(zp.theta), _ell(zm.theta)
        # both null vectors pair to -1 with o, so time 0 is the projection of o
        norm = np.sqrt(-2 * minkowski(lp, lm))
        return HypLine(tuple((lp + lm) / norm), tuple((lp - lm) / norm))

    def endpoints(self, line):
        return line.minus, line.plus

    # -- rays and boundary -------------------------------------------------

    def _ray_tangent(self, x, z):
        X = x.array
        ell = _ell(z.theta)
        v = ell / _ell_pairing(z.theta, X) - X
        return v / np.sqrt(minkowski(v, v))

    def ray_point(self, x, z, t):
        """Point at time ``t`` on the ray from ``x`` towards ``z``."""
        v = self._ray_tangent(x, z)
        return HypPoint(tuple(np.cosh(t) * x.array + np.sinh(t) * v))

    def boundary_product(self, z, w, x=None):
        x = self.basepoint if x is None else x
        if z == w:
            return np.inf
        X = x.array
        s = np.sin(angle_gap(z.theta, w.theta) / 2)
        return float(
            -np.log(s) + 0.5 * np.log(_ell_pairing(z.theta, X) * _ell_pairing(w.theta, X))
        )

    def point_end_product(self, y, z, x=None):
        x = self.basepoint if x is None else x
        ratio = _ell_pairing(z.theta, y.array) / _ell_pairing(z.theta, x.array)
        return float(0.5 * (self.distance(x, y) - np.log(ratio)))

    def ray_distance(self, y, x, z):
        """Distance from ``y`` to the ray from ``x`` towards ``z``."""
        v = self._ray_tangent(x, z)
        X, Y = x.array, y.array
        A = -minkowski(Y, X)
        B = -minkowski(Y, v)
        if B >= 0:
            return self.distance(x, y)
        t = np.arctanh(min(-B / A, 1 - 1e-16))
        # refine the foot with a short golden-section search on the convex profile
        lo, hi = max(0.0, t - 1.0), t + 1.0
        f = lambda s: self.distance(y, HypPoint(tuple(np.cosh(s) * X + np.sinh(s) * v)))
        g = 0.5 * (np.sqrt(5) - 1)
        a, b = hi - g * (hi - lo), lo + g * (hi - lo)
        fa, fb = f(a), f(b)
        for _ in range(80):
            if fa < fb:
                hi, b, fb = b, a, fa
                a = hi - g * (hi - lo)
                fa = f(a)
            else:
                lo, a, fa = a, b, fb
                b = lo + g * (hi - lo)
                fb = f(b)
        return min(fa, fb, f(t), f(max(lo, 0.0)))

    # -- flow support ------------------------------------------------------

    def line_profiles(self, line, others, s):
        s = np.asarray(s, dtype=float)
        r1, t1 = line.trace(s)
        out = np.empty((len(others), s.size))
        for j, g in enumerate(others):
            r2, t2 = g.trace(s)
            out[j] = polar_distance(r1, t1, r2, t2)
        return out

    # -- measure -----------------------------------------------------------

    def ball_measure(self, x, T):
        return 2 * pi * (np.cosh(T) - 1) if T > 0 else 0.0

    # -- sampling ----------------------------------------------------------

    def _frame(self, C):
        r, phi = polar(C)
        e_r = np.array([np.cosh(r) * np.cos(phi), np.cosh(r) * np.sin(phi), np.sinh(r)])
        e_phi = np.array([-np.sin(phi), np.cos(phi), 0.0])
        return e_r, e_phi

    def _ring(self, C, e_r, e_phi, s, n):
        psi = 2 * pi * np.arange(n) / n
        dirs = np.cos(psi)[:, None] * e_r + np.sin(psi)[:, None] * e_phi
        X = np.cosh(s) * C + np.sinh(s) * dirs
        return lift(X[:, 0], X[:, 1])

    def sample_region(self, region, mesh=0.5):
        """Mesh-dense sample on concentric rings about the region center.

        Rings are ``mesh`` apart radially and each ring is cut into arcs
        of length at most ``mesh``; a sphere is a single ring with angular
        step ``mesh / sinh T``.
        """
        if mesh <= 0:
            raise DomainError("mesh must be positive")
        c, lo, hi = region_bounds(region)
        self.check_point(c)
        C = c.array
        e_r, e_phi = self._frame(C)
        if lo == hi:
            radii = np.array([hi])
        else:
            k = max(1, ceil((hi - lo) / mesh - 1e-12))
            radii = np.linspace(lo, hi, k + 1)
        counts = [1 if s == 0 else max(3, ceil(2 * pi * np.sinh(s) / mesh - 1e-9)) for s in radii]
        check_cap(sum(counts), self.cap)
        X = np.vstack([self._ring(C, e_r, e_phi, s, n) for s, n in zip(radii, counts)])
        return HypSample(self, X, center=c, region=region)

    def make_sample(self, points, center=None, region=None):
        X = np.array([self.check_point(p).coords for p in points], dtype=float).reshape(-1, 3)
        return HypSample(self, X, center=center, region=region)


class HypSample(Sample):
    """Hyperboloid sample with a Poincaré-disk KD-tree for range queries."""

    def __init__(self, space, X, center=None, region=None):
        self.space = space
        self.center = space.basepoint if center is None else center
        self.region = region
        X = lift(X[:, 0], X[:, 1]) if len(X) else np.zeros((0, 3))
        r, th = polar(X)
        cr, ct = polar(self.center.coords)
        cd = polar_distance(r, th, cr, ct)
        order = greedy_order(cd, [np.round(X[:, 0], 12), np.round(X[:, 1], 12), X[:, 2]])
        self.coords = X[order]
        self.r = r[order]
        self.theta = th[order]
        self.center_distances = cd[order]
        self.n = len(X)
        self._kd = None

    def point(self, i):
        return HypPoint(tuple(self.coords[i]))

    def pair_distances(self, I, J):
        return polar_distance(self.r[I], self.theta[I], self.r[J], self.theta[J])

    def distances_from(self, i, idx=None):
        idx = np.arange(self.n) if idx is None else np.asarray(idx, dtype=np.int64)
        return polar_distance(self.r[i], self.theta[i], self.r[idx], self.theta[idx])

    def _disk(self):
        if self._kd is None:
            u = np.tanh(self.r / 2)
            self._kd = cKDTree(np.column_stack([u * np.cos(self.theta), u * np.sin(self.theta)]))
        return self._kd

    def candidates(self, i, radius):
        r, th = self.r[i], self.theta[i]
        a = np.tanh((r - radius) / 2)
        b = np.tanh((r + radius) / 2)
        mid = 0.5 * (a + b)
        rad = 0.5 * (b - a)
        center = (mid * np.cos(th), mid * np.sin(th))
        idx = self._disk().query_ball_point(center, rad * (1 + 1e-9) + 1e-12)
        return np.sort(np.asarray(idx, dtype=np.int64))
