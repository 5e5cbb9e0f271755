"""Regions, finite samples and model-independent helpers."""

from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, DomainError

#: Absolute slack used when comparing a distance against a radius.
TOL = 1e-12

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class Ball:
    """Closed ball ``B(center, radius)``."""

    center: object
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("ball radius must be nonnegative")


@dataclass(frozen=True)
class Sphere:
    """Metric sphere ``S(center, radius)``."""

    center: object
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("sphere radius must be nonnegative")


@dataclass(frozen=True)
class Annulus:
    """Closed annulus ``{p : inner <= d(center, p) <= outer}``."""

    center: object
    inner: float
    outer: float

    def __post_init__(self):
        if self.inner < 0 or self.outer < self.inner:
            raise DomainError("annulus needs 0 <= inner <= outer")


def region_bounds(region):
    """Return ``(center, lo, hi)`` distance bounds of a region."""
    if isinstance(region, Ball):
        return region.center, 0.0, float(region.radius)
    if isinstance(region, Sphere):
        return region.center, float(region.radius), float(region.radius)
    if isinstance(region, Annulus):
        return region.center, float(region.inner), float(region.outer)
    raise DomainError(f"unknown region {region!r}")


def check_cap(needed, cap):
    if needed > cap:
        raise CapacityError(cap, int(needed))


def greedy_order(center_dist, coord_keys):
    """Permutation sorting by descending center distance, then coordinates.

    Distances are rounded to 12 decimals so that floating noise does not
    override the coordinate tie-break.
    """
    cd = np.round(np.asarray(center_dist, dtype=float), 12)
    keys = [np.asarray(k) for k in reversed(coord_keys)] + [-cd]
    return np.lexsort(keys)


class Sample:
    """A finite point set of one space model in greedy order.

    Subclasses store model coordinates as arrays and implement
    :meth:`distances_from` and :meth:`candidates`.
    """

    space = None
    center = None
    region = None

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.point(int(i))

    def __iter__(self):
        return (self.point(i) for i in range(self.n))

    @property
    def points(self):
        return [self.point(i) for i in range(self.n)]

    def candidates(self, i, radius):
        """Indices that may lie within ``radius`` of point ``i`` (a superset)."""
        return np.arange(self.n)

    def within(self, i, radius, tol=TOL):
        """Indices of points at distance ``<= radius + tol`` from point ``i``."""
        idx = self.candidates(i, radius)
        d = self.distances_from(i, idx)
        return idx[d <= radius + tol * max(1.0, radius)]

    def distance_matrix(self):
        idx = np.arange(self.n)
        return np.vstack([self.distances_from(i, idx) for i in range(self.n)])


def space_distance(space, x, y):
    """Distance between two points of ``space``."""
    return space.distance(x, y)
