"""Euclidean space ``R^dim`` with straight-line bicombing."""

from dataclasses import dataclass
from itertools import product
from math import ceil, gamma, pi, sqrt

import numpy as np
from scipy.spatial import cKDTree

from ..errors import (
    DegenerateSegmentError,
    DomainError,
    ModelMismatchError,
    UnsupportedBoundaryError,
)
from .base import DEFAULT_CAP, Sample, Sphere, check_cap, greedy_order, region_bounds


@dataclass(frozen=True)
class EucPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in np.ravel(self.coords)))

    @property
    def array(self):
        return np.array(self.coords)


@dataclass(frozen=True)
class EucLine:
    """Unit speed line ``t -> p + t v``."""

    p: tuple
    v: tuple

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "p", tuple(float(c) for c in self.p))
        object.__setattr__(self, "v", tuple(v / np.linalg.norm(v)))

    def __call__(self, t):
        return self.eval(t)

    def coords(self, s):
        s = np.asarray(s, dtype=float)[..., None]
        return np.asarray(self.p) + s * np.asarray(self.v)

    def eval(self, t):
        return EucPoint(self.coords(float(t)))

    def shifted(self, t):
        return EucLine(tuple(self.coords(float(t))), self.v)

    def trace(self, s):
        return self.coords(s)


class Euclidean:
    """Euclidean space of dimension ``dim`` with basepoint at the origin."""

    kind = "euclidean"
    approximate = False

    def __init__(self, dim=2, packing_params=None, delta_hint=None, cap=DEFAULT_CAP):
        if int(dim) != dim or dim < 1:
            raise DomainError("dimension must be ≥ 1")
        self.dim = int(dim)
        self.packing_params = packing_params
        self.delta_hint = delta_hint
        self.cap = int(cap)
        self.basepoint = EucPoint((0.0,) * self.dim)

    def __repr__(self):
        return f"Euclidean({self.dim})"

    def __eq__(self, other):
        return isinstance(other, Euclidean) and other.dim == self.dim

    def __hash__(self):
        return hash(("euclidean", self.dim))

    def point(self, *coords):
        if len(coords) == 1 and np.ndim(coords[0]) == 1:
            coords = tuple(coords[0])
        return self.check_point(EucPoint(coords))

    def check_point(self, x):
        if not isinstance(x, EucPoint) or len(x.coords) != self.dim:
            raise ModelMismatchError(f"{x!r} is not a point of {self!r}")
        return x

    def check_line(self, g):
        if not isinstance(g, EucLine):
            raise ModelMismatchError(f"{g!r} is not a Euclidean line")
        return g

    def distance(self, x, y):
        self.check_point(x)
        self.check_point(y)
        return float(np.linalg.norm(x.array - y.array))

    def gromov_product(self, x, y, z):
        return (self.distance(x, y) + self.distance(x, z) - self.distance(y, z)) / 2

    def bicombing(self, x, y, t):
        if not 0 <= t <= 1:
            raise DomainError("t must lie in [0, 1]")
        self.check_point(x)
        self.check_point(y)
        if t == 0:
            return x
        if t == 1:
            return y
        return EucPoint((1 - t) * x.array + t * y.array)

    def extend_to_line(self, x, y):
        if self.distance(x, y) == 0:
            raise DegenerateSegmentError("cannot extend a degenerate segment")
        return EucLine(x.coords, tuple(y.array - x.array))

    def line_through(self, p, direction):
        """Line through ``p`` with unit direction ``direction`` (angle in 2-D)."""
        if np.ndim(direction) == 0:
            if self.dim != 2:
                raise DomainError("angles only describe directions in the plane")
            direction = (np.cos(direction), np.sin(direction))
        return EucLine(p.coords, tuple(direction))

    def line_from_boundary_pair(self, zminus, zplus):
        raise UnsupportedBoundaryError("Euclidean space has no Gromov boundary")

    def line_profiles(self, line, others, s):
        A = line.trace(s)
        return np.vstack([np.linalg.norm(A - g.trace(s), axis=-1) for g in others])

    def ball_measure(self, x, T):
        if T <= 0:
            return 0.0
        d = self.dim
        return pi ** (d / 2) / gamma(d / 2 + 1) * T**d

    def _sphere_points(self, radius, step):
        d = self.dim
        if radius == 0:
            return np.zeros((1, d))
        if d == 1:
            return np.array([[-radius], [radius]])
        if d == 2:
            n = max(3, ceil(2 * pi * radius / step - 1e-9))
            a = 2 * pi * np.arange(n) / n
            return radius * np.column_stack([np.cos(a), np.sin(a)])
        h = step / (4 * sqrt(d))
        shell = self._lattice(radius + step / 2, h)
        nr = np.linalg.norm(shell, axis=1)
        keep = np.abs(nr - radius) <= step / 2
        return radius * shell[keep] / nr[keep, None]

    def _lattice(self, radius, h):
        m = int(np.floor(radius / h + 1e-9))
        check_cap((2 * m + 1) ** self.dim, self.cap)
        axis = h * np.arange(-m, m + 1)
        grid = np.array(list(product(axis, repeat=self.dim))).reshape(-1, self.dim)
        return grid[np.linalg.norm(grid, axis=1) <= radius + 1e-12]

    def sample_region(self, region, mesh=0.5):
        """Cubic lattice of covering radius ``mesh / 2`` plus dense bounding spheres."""
        if mesh <= 0:
            raise DomainError("mesh must be positive")
        c, lo, hi = region_bounds(region)
        self.check_point(c)
        parts = []
        if not isinstance(region, Sphere):
            h = mesh / sqrt(self.dim)
            grid = self._lattice(hi, h)
            nr = np.linalg.norm(grid, axis=1)
            parts.append(grid[nr >= lo - 1e-12])
            parts.append(self._sphere_points(lo, mesh / 2))
        parts.append(self._sphere_points(hi, mesh / 2 if not isinstance(region, Sphere) else mesh))
        X = np.unique(np.round(np.vstack(parts), 12), axis=0) + c.array
        check_cap(len(X), self.cap)
        return EucSample(self, X, center=c, region=region)

    def make_sample(self, points, center=None, region=None):
        X = np.array([self.check_point(p).coords for p in points], dtype=float).reshape(-1, self.dim)
        return EucSample(self, X, center=center, region=region)


class EucSample(Sample):
    def __init__(self, space, X, center=None, region=None):
        self.space = space
        self.center = space.basepoint if center is None else center
        self.region = region
        cd = np.linalg.norm(X - self.center.array, axis=1)
        order = greedy_order(cd, [X[:, j] for j in range(X.shape[1])])
        self.coords = X[order]
        self.center_distances = cd[order]
        self.n = len(X)
        self._kd = None

    def point(self, i):
        return EucPoint(self.coords[i])

    def pair_distances(self, I, J):
        return np.linalg.norm(self.coords[I] - self.coords[J], axis=-1)

    def distances_from(self, i, idx=None):
        idx = np.arange(self.n) if idx is None else np.asarray(idx, dtype=np.int64)
        return np.linalg.norm(self.coords[idx] - self.coords[i], axis=1)

    def candidates(self, i, radius):
        if self._kd is None:
            self._kd = cKDTree(self.coords)
        idx = self._kd.query_ball_point(self.coords[i], radius * (1 + 1e-9) + 1e-12)
        return np.sort(np.asarray(idx, dtype=np.int64))
