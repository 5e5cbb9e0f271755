"""Gromov products, four-point delta, boundary products, visual balls and shadows."""

from dataclasses import dataclass, field
from itertools import combinations
from math import exp, log

import numpy as np

from .errors import DomainError, InsufficientSampleError, UnsupportedBoundaryError
from .nets import as_sample

SEED = 0x5EED_0F_DE17A
QUAD_LIMIT = 300
N_QUADS = 200_000


def gromov_product(space, x, y, z):
    """``(y, z)_x = (d(x, y) + d(x, z) - d(y, z)) / 2``."""
    return space.gromov_product(x, y, z)


@dataclass(frozen=True)
class GromovProductTable:
    """Gromov products of a finite point set relative to a basepoint."""

    basepoint: object
    points: tuple
    entries: dict = field(repr=False)

    @classmethod
    def build(cls, space, basepoint, points):
        pts = tuple(points)
        entries = {}
        for i, j in combinations(range(len(pts)), 2):
            entries[(i, j)] = space.gromov_product(basepoint, pts[i], pts[j])
        return cls(basepoint, pts, entries)

    def __getitem__(self, pair):
        i, j = pair
        if i == j:
            raise KeyError("diagonal products are distances to the basepoint")
        return self.entries[(min(i, j), max(i, j))]


@dataclass(frozen=True)
class DeltaEstimate:
    """Four-point delta of a sample with its reproducibility data."""

    delta: float
    quadruples: int
    seed: int
    exhaustive: bool

    def __float__(self):
        return self.delta


def _quad_delta(d01, d23, d02, d13, d03, d12):
    """Largest minus middle of the three pair sums, halved."""
    s = np.stack([d01 + d23, d02 + d13, d03 + d12])
    s.sort(axis=0)
    return (s[2] - s[1]) / 2


def four_point_delta(D):
    """Exact four-point delta of a full distance matrix.

    The maximum over ordered quadruples of
    ``min{(x,y)_w, (y,z)_w} - (x,z)_w`` equals half the gap between the
    largest and middle of the three pair sums over unordered quadruples.
    """
    D = np.asarray(D, dtype=float)
    n = len(D)
    best = 0.0
    for j in range(1, n - 2):
        m = n - j - 1
        kk, ll = np.triu_indices(m, k=1)
        kk = kk + j + 1
        ll = ll + j + 1
        i = np.arange(j)[:, None]
        val = _quad_delta(D[i, j], D[kk, ll][None, :], D[i, kk], D[j, ll][None, :],
                          D[i, ll], D[j, kk][None, :])
        if val.size:
            best = max(best, float(val.max()))
    return best


def estimate_delta(space, sample, seed=SEED, full_output=False, n_quads=N_QUADS):
    """Empirical four-point constant of a sample.

    Samples up to 300 points are scanned exhaustively; larger ones use
    ``n_quads`` random quadruples drawn with ``seed``.

    Returns
    -------
    float or DeltaEstimate
        The clamped maximum, with quadruple count and seed when
        ``full_output`` is set.
    """
    s = as_sample(space, sample)
    n = len(s)
    if n < 4:
        raise InsufficientSampleError("at least 4 points are needed")
    if n <= QUAD_LIMIT:
        D = np.vstack([s.distances_from(i) for i in range(n)])
        delta = four_point_delta(D)
        count = n * (n - 1) * (n - 2) * (n - 3) // 24
        out = DeltaEstimate(max(delta, 0.0), count, seed, True)
    else:
        rng = np.random.default_rng(seed)
        q = np.sort(rng.choice(n, size=(n_quads, 4)), axis=1)
        q = q[(np.diff(q, axis=1) > 0).all(axis=1)]
        a, b, c, d = q.T
        pd = s.pair_distances
        val = _quad_delta(pd(a, b), pd(c, d), pd(a, c), pd(b, d), pd(a, d), pd(b, c))
        out = DeltaEstimate(max(float(val.max()), 0.0), len(q), seed, False)
    return out if full_output else out.delta


def model_delta(space, sample=None, seed=SEED):
    """``space.delta_hint`` if set, otherwise the sample estimate."""
    if space.delta_hint is not None:
        return float(space.delta_hint)
    if sample is None:
        raise DomainError("no delta_hint and no sample to estimate delta from")
    return estimate_delta(space, sample, seed)


def _require_boundary(space):
    if not hasattr(space, "boundary_product"):
        raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def boundary_gromov_product(space, z, w, x=None):
    """``(z, w)_x`` for boundary points; ``inf`` when ``z == w``.

    Trees use prefix arithmetic.  In the hyperbolic plane the limit along
    the rays has the closed form
    ``-log(sin(gap/2)) + log(-<l_z, x> -<l_w, x>)/2`` with null vectors
    ``l = (cos t, sin t, 1)``.
    """
    _require_boundary(space)
    return space.boundary_product(z, w, x)


def visual_ball_membership(space, z, rho, w, x=None):
    """Whether ``w`` lies in the generalized visual ball ``B(z, rho)``."""
    if not 0 < rho <= 1:
        raise DomainError("rho must lie in (0, 1]")
    return boundary_gromov_product(space, z, w, x) > log(1 / rho)


@dataclass(frozen=True)
class Shadow:
    """Boundary points whose ray from ``source`` meets the open ball ``B(caster, radius)``."""

    source: object
    caster: object
    radius: float


def shadow_membership(space, shadow, z):
    if shadow.radius <= 0:
        raise DomainError("shadow radius must be positive")
    _require_boundary(space)
    return space.ray_distance(shadow.caster, shadow.source, z) < shadow.radius


def verify_shadow_ball_lemma(space, z, x, T, r, probes, delta=None):
    """Check both inclusions between visual balls and shadows on probes.

    ``B(z, e^-T)`` must lie in ``Shad_x(xi(T), max(7 delta, r))`` and
    ``Shad_x(xi(T), r)`` in ``B(z, e^(r - T))``, where ``xi`` is the ray
    from ``x`` to ``z``.
    """
    delta = model_delta(space) if delta is None else delta
    y = space.ray_point(x, z, T)
    big = Shadow(x, y, max(7 * delta, r))
    small = Shadow(x, y, r)
    first = second = 0
    viol_first, viol_second = [], []
    for w in probes:
        prod = boundary_gromov_product(space, z, w, x)
        if prod > T:
            first += 1
            if not shadow_membership(space, big, w):
                viol_first.append(w)
        if shadow_membership(space, small, w):
            second += 1
            if not prod > T - r:
                viol_second.append(w)
    return {
        "probes": len(probes),
        "ball_members": first,
        "shadow_members": second,
        "ball_in_shadow_violations": len(viol_first),
        "shadow_in_ball_violations": len(viol_second),
        "holds": not viol_first and not viol_second,
    }


def four_point_violations(space, sample, delta):
    """Number of quadruples breaking the four-point condition with ``delta``."""
    s = as_sample(space, sample)
    n = len(s)
    D = np.vstack([s.distances_from(i) for i in range(n)])
    bad = 0
    for j in range(1, n - 2):
        kk, ll = np.triu_indices(n - j - 1, k=1)
        kk = kk + j + 1
        ll = ll + j + 1
        i = np.arange(j)[:, None]
        val = _quad_delta(D[i, j], D[kk, ll][None, :], D[i, kk], D[j, ll][None, :],
                          D[i, ll], D[j, kk][None, :])
        bad += int((val > delta).sum())
    return bad


def boundary_triple_violations(space, ends, x, delta, tol=0.0):
    """Triples breaking ``(z,w)_x >= min{(z,u)_x, (w,u)_x} - delta``."""
    bad = 0
    m = len(ends)
    P = [[boundary_gromov_product(space, ends[i], ends[j], x) for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                if P[i][j] < min(P[i][k], P[j][k]) - delta - tol:
                    bad += 1
    return bad


def product_rays_violations(space, pairs, x, T, delta, tol=0.0):
    """Pairs with ``(z,w)_x >= T`` whose rays are more than ``4 delta`` apart at ``T - delta``."""
    bad = 0
    checked = 0
    t = max(T - delta, 0.0)
    for z, w in pairs:
        if boundary_gromov_product(space, z, w, x) >= T:
            checked += 1
            d = space.distance(space.ray_point(x, z, t), space.ray_point(x, w, t))
            if d > 4 * delta + tol:
                bad += 1
    return {"checked": checked, "violations": bad}


def segment_distance(space, x, y, z, iters=100):
    """Distance from ``x`` to the bicombing segment ``[y, z]`` (convex profile)."""
    f = lambda t: space.distance(x, space.bicombing(y, z, t))
    lo, hi = 0.0, 1.0
    g = 0.5 * (5**0.5 - 1)
    a, b = hi - g * (hi - lo), lo + g * (hi - lo)
    fa, fb = f(a), f(b)
    for _ in range(iters):
        if fa < fb:
            hi, b, fb = b, a, fa
            a = hi - g * (hi - lo)
            fa = f(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + g * (hi - lo)
            fb = f(b)
    return min(fa, fb, f(0.0), f(1.0))


def projection_violations(space, triples, delta, tol=1e-9):
    """Triples with ``(y,z)_x < d(x, [y,z]) - 4 delta``."""
    bad = 0
    for x, y, z in triples:
        if space.gromov_product(x, y, z) < segment_distance(space, x, y, z) - 4 * delta - tol:
            bad += 1
    return bad


def visual_radius(T):
    """Visual-ball radius ``e^-T`` at product scale ``T``."""
    return exp(-T)


__all__ = [
    "DeltaEstimate", "GromovProductTable", "Shadow", "boundary_gromov_product",
    "boundary_triple_violations", "estimate_delta", "four_point_delta", "four_point_violations",
    "gromov_product", "model_delta", "product_rays_violations", "projection_violations",
    "segment_distance", "shadow_membership", "verify_shadow_ball_lemma", "visual_ball_membership",
    "visual_radius",
]
