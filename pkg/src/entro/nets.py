"""Greedy separated sets and covers of finite samples.

All greedy procedures scan a sample in one fixed order: decreasing
distance to the region center, ties broken by model coordinates.  Under a
common order a maximal ``2r``-separated set coincides with the greedy
``2r``-cover, which makes the packing/covering chain exact on greedy
values.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, EmptyRegionError
from .spaces import Ball, Sample
from .spaces.base import TOL


@dataclass(frozen=True)
class Net:
    """Finite subset of a sample with its certified role.

    Attributes
    ----------
    indices : tuple of int
        Positions of the net points in the sample.
    scale : float
        The scale ``r``.
    role : str
        ``"dense"`` (every sample point within ``r``), ``"separated"``
        (pairwise distances ``> 2r``) or ``"both"``.
    """

    indices: tuple
    scale: float
    role: str
    sample: Sample = field(repr=False, compare=False)
    region: object = None

    @property
    def cardinality(self):
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    @property
    def points(self):
        return [self.sample[i] for i in self.indices]


def as_sample(space, sample, center=None):
    """Wrap a point list into a :class:`Sample` (identity on samples)."""
    if isinstance(sample, Sample):
        return sample
    pts = list(sample)
    if not pts:
        raise EmptyRegionError("empty sample")
    if space is None:
        raise ConfigurationError("a space is needed to sample a plain point list")
    return space.make_sample(pts, center=center)


def greedy_centers(sample, radius, tol=TOL):
    """Indices chosen by one greedy pass that blocks ``radius``-neighborhoods."""
    n = len(sample)
    if n == 0:
        raise EmptyRegionError("empty sample")
    blocked = np.zeros(n, dtype=bool)
    chosen = []
    for i in range(n):
        if blocked[i]:
            continue
        chosen.append(i)
        blocked[sample.within(i, radius, tol)] = True
    return tuple(chosen)


def max_separated(sample, r, space=None):
    """Greedy maximal ``2r``-separated subset (strict separation).

    Parameters
    ----------
    sample : Sample or list of points
        Points to select from; plain lists need ``space``.
    r : float
        Half the separation distance.

    Returns
    -------
    Net
        Role ``"both"``: the set is ``2r``-separated and, being maximal,
        ``2r``-dense in the sample.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    s = as_sample(space, sample)
    idx = greedy_centers(s, 2 * r)
    return Net(idx, r, "both", s, s.region)


def greedy_cover(sample, r, space=None):
    """Greedy ``r``-dense subset of the sample."""
    if r <= 0:
        raise DomainError("r must be positive")
    s = as_sample(space, sample)
    idx = greedy_centers(s, r)
    return Net(idx, r, "dense", s, s.region)


def is_separated(sample, indices, dist, tol=TOL):
    """True when the chosen points are pairwise more than ``dist`` apart."""
    idx = np.asarray(indices, dtype=np.int64)
    for k, i in enumerate(idx[:-1]):
        if np.any(sample.distances_from(i, idx[k + 1:]) <= dist + tol):
            return False
    return True


def is_dense(sample, indices, r, tol=TOL):
    """True when every sample point lies within ``r`` of a chosen point."""
    covered = np.zeros(len(sample), dtype=bool)
    for i in indices:
        covered[sample.within(i, r, tol)] = True
    return bool(covered.all())


def verify_pack_cov_chain(sample, r, space=None):
    """Check ``Pack(2r) <= Cov(2r) <= Pack(r)`` on greedy values.

    Returns
    -------
    dict
        ``pack_2r``, ``cov_2r`` and ``pack_r`` cardinalities and ``holds``.
    """
    s = as_sample(space, sample)
    pack_2r = len(max_separated(s, 2 * r))
    cov_2r = len(greedy_cover(s, 2 * r))
    pack_r = len(max_separated(s, r))
    return {
        "pack_2r": pack_2r,
        "cov_2r": cov_2r,
        "pack_r": pack_r,
        "holds": pack_2r <= cov_2r <= pack_r,
    }


def packing_bound(P0, r0, R, r, kind="pack"):
    """Upper bound on ``Pack(R, r)`` or ``Cov(R, r)`` from ``(P0, r0)``.

    ``Pack(R, r) <= P0 (1 + P0)^(R/r - 1)`` for ``r <= r0`` and
    ``P0 (1 + P0)^(R/r0 - 1)`` otherwise; the covering bounds follow from
    ``Cov(R, r) <= Pack(R, r/2)``.
    """
    if kind == "cov":
        return packing_bound(P0, r0, R, r / 2, "pack")
    if r <= r0:
        return P0 * (1 + P0) ** (R / r - 1)
    return P0 * (1 + P0) ** (R / r0 - 1)


def verify_packing_propagation(space, R, r, mesh=None, center=None):
    """Compare greedy packing and covering at the basepoint with the bounds.

    The greedy ``2r``-separated set is a lower bound for ``Pack(R, r)`` and
    the greedy ``r``-cover is a ``2 (r/2)``-separated set, so each is
    asserted against the matching bound.
    """
    if space.packing_params is None:
        raise ConfigurationError("space declares no packing_params (P0, r0)")
    if not 0 < r <= R:
        raise DomainError("need 0 < r <= R")
    P0, r0 = space.packing_params
    center = space.basepoint if center is None else center
    mesh = r / 4 if mesh is None else mesh
    s = space.sample_region(Ball(center, R), mesh)
    pack = len(max_separated(s, r))
    cov = len(greedy_cover(s, r))
    pb = packing_bound(P0, r0, R, r, "pack")
    cb = packing_bound(P0, r0, R, r, "cov")
    return {
        "R": R,
        "r": r,
        "pack": pack,
        "pack_bound": pb,
        "cov": cov,
        "cov_bound": cb,
        "holds": pack <= pb and cov <= cb,
    }


def exhaustive_max_separated(dist, sep):
    """Largest subset with pairwise distances ``> sep`` by branch and bound.

    Intended for small metrics (about 40 points) used as oracles.
    """
    D = np.asarray(dist, dtype=float)
    n = len(D)
    ok = D > sep + TOL
    best = []

    def grow(chosen, cand):
        nonlocal best
        if len(chosen) + len(cand) <= len(best):
            return
        if not cand:
            best = list(chosen)
            return
        i = cand[0]
        grow(chosen + [i], [j for j in cand[1:] if ok[i, j]])
        grow(chosen, cand[1:])

    grow([], list(range(n)))
    return best


def packing_constant(space, r0=1.0, mesh=None, centers=None):
    """Exhaustive ``P0``: largest ``2 r0``-separated subset of a ``3 r0`` ball sample.

    The sample uses every vertex and edge midpoint for trees, or the given
    ``mesh``; ``centers`` defaults to the basepoint.
    """
    centers = [space.basepoint] if centers is None else centers
    best = 0
    for c in centers:
        s = space.sample_region(Ball(c, 3 * r0), 0.5 if mesh is None else mesh)
        best = max(best, len(exhaustive_max_separated(s.distance_matrix(), 2 * r0)))
    return best
