"""Geodesic lines, the weighted metrics ``f`` and ``f^T``, and flow entropy.

For a weight ``f`` the distance between lines is

    f(g, g') = integral of d(g(s), g'(s)) f(s) ds,

and ``f^T(g, g') = max_{0 <= t <= T} f(Phi_t g, Phi_t g')`` where
``Phi_t g = g(. + t)``.  In a space with a convex bicombing,
``t -> d(g(s + t), g'(s + t))`` is convex for every ``s``, so
``t -> f(Phi_t g, Phi_t g')`` is convex and the maximum over ``[0, T]``
sits at an endpoint.
"""

import warnings
from math import ceil, exp, floor, pi, tau

import numpy as np
from scipy import integrate

from .entropy import GrowthSeries, fit_entropy
from .errors import (
    ConfigurationError,
    DomainError,
    GenerationDepthError,
    InvalidWeightError,
)
from .nets import greedy_centers
from .spaces import Ball
from .spaces.hyperbolic import polar_distance
from .spaces.tree import TreeEnd

H0 = 1 / 64
H_MIN = 2.0**-14
FAMILY_TOL = 1e-3


# -- weights -----------------------------------------------------------------


class WeightFunction:
    """A density in the admissible class together with its moment data."""

    tag = "custom"

    def __call__(self, s):
        raise NotImplementedError

    C_f = None

    def tail_bound(self, P):
        raise NotImplementedError

    def mass_beyond(self, P):
        raise NotImplementedError


class ExpHalf(WeightFunction):
    """``f(s) = exp(-|s|) / 2`` with ``C_f = 2``."""

    tag = "ExpHalf"
    C_f = 2.0

    def __call__(self, s):
        return 0.5 * np.exp(-np.abs(s))

    def tail_bound(self, P):
        return 2 * (P + 1) * exp(-P)

    def mass_beyond(self, P):
        return exp(-P)

    def __repr__(self):
        return "ExpHalf()"

    def __eq__(self, other):
        return isinstance(other, ExpHalf)

    def __hash__(self):
        return hash("ExpHalf")


EXP_HALF = ExpHalf()


class CustomWeight(WeightFunction):
    """User density, validated numerically on a grid.

    Raises
    ------
    InvalidWeightError
        If positivity, symmetry, unit mass or a finite first moment fails.
    """

    tag = "custom"

    def __init__(self, density, grid=np.linspace(-20, 20, 2001), mass_tol=1e-6):
        self.density = density
        vals = np.asarray(density(grid), dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise InvalidWeightError("density must be positive and finite")
        if np.max(np.abs(vals - np.asarray(density(-grid)))) > 1e-9 * max(1.0, vals.max()):
            raise InvalidWeightError("density must be symmetric")
        f = lambda s: float(density(np.array(s)))
        mass = 2 * integrate.quad(f, 0, np.inf, limit=200)[0]
        if abs(mass - 1) > mass_tol:
            raise InvalidWeightError(f"density has mass {mass}, not 1")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            moment, err = integrate.quad(lambda s: 4 * s * f(s), 0, np.inf, limit=200)
        if not np.isfinite(moment) or err > 1e-3 * max(1.0, moment):
            raise InvalidWeightError("first moment is not finite")
        self.C_f = moment
        self._f = f

    def __call__(self, s):
        return np.asarray(self.density(np.asarray(s)), dtype=float)

    def tail_bound(self, P):
        return integrate.quad(lambda s: 4 * s * self._f(s), P, np.inf, limit=200)[0]

    def mass_beyond(self, P):
        return 2 * integrate.quad(self._f, P, np.inf, limit=200)[0]


def truncation(f, d0, tol):
    """Smallest half-width ``P`` (step 1/2) with ``tail + d0 * mass < tol / 2``."""
    P = 1.0
    while f.tail_bound(P) + d0 * f.mass_beyond(P) >= tol / 2:
        P += 0.5
        if P > 1e4:
            raise InvalidWeightError("weight tails decay too slowly")
    return P


# -- quadrature ----------------------------------------------------------------


def _trapezoid(profile, f, P, h, t):
    N = int(ceil(P / h - 1e-12))
    s = h * np.arange(-N, N + 1)
    w = f(s) * h
    w[0] *= 0.5
    w[-1] *= 0.5
    D = profile(s + t)
    return D @ w


def _quadrature(profile, f, d0, tol, t=0.0, adaptive=True, h0=H0):
    P = truncation(f, d0, tol)
    h = h0
    I = _trapezoid(profile, f, P, h, t)
    if not adaptive:
        return I
    while h > H_MIN:
        h /= 2
        J = _trapezoid(profile, f, P, h, t)
        if np.max(np.abs(J - I)) / 3 < tol / 2:
            return J
        I = J
    return I


def _profile_fn(space, g, others):
    return lambda s: space.line_profiles(g, others, s)


def f_distances(space, g, others, f=EXP_HALF, tol=1e-6, t=0.0, adaptive=True):
    """``f(Phi_t g, Phi_t h)`` for each ``h`` in ``others`` (vector)."""
    others = list(others)
    if not others:
        return np.zeros(0)
    d0 = float(np.max(space.line_profiles(g, others, np.array([t]))))
    return _quadrature(_profile_fn(space, g, others), f, d0, tol, t, adaptive)


def f_distance(space, gamma, gamma2, f=EXP_HALF, tol=1e-6):
    """Weighted distance ``int d(gamma(s), gamma2(s)) f(s) ds`` to within ``tol``.

    The integral is truncated at ``+-P`` where the tail bound plus
    ``d(gamma(0), gamma2(0))`` times the residual mass is below ``tol/2``;
    the composite trapezoid rule starts at step ``1/64`` and halves the step
    until the Richardson error estimate is below ``tol/2``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    return float(f_distances(space, gamma, [gamma2], f, tol)[0])


def f_dynamical_distance(space, gamma, gamma2, f=EXP_HALF, T=0.0, tol=1e-6, method="convex"):
    """``f^T`` distance.

    ``method="convex"`` returns the larger of the values at ``t = 0`` and
    ``t = T``, which is exact for convex bicombings.  ``method="grid"``
    maximizes over a grid of step ``min(0.25, tol)`` and adds the Lipschitz
    slack ``2 * step``; it is used automatically for approximate models.
    """
    if T < 0:
        raise DomainError("T must be nonnegative")
    if method == "convex" and not space.approximate:
        a = f_distances(space, gamma, [gamma2], f, tol, 0.0)[0]
        b = f_distances(space, gamma, [gamma2], f, tol, float(T))[0] if T > 0 else a
        return float(max(a, b))
    step = min(0.25, tol)
    ts = np.arange(0.0, T + step / 2, step) if T > 0 else np.array([0.0])
    vals = [f_distances(space, gamma, [gamma2], f, tol, float(t))[0] for t in ts]
    return float(max(vals) + (2 * step if T > 0 else 0.0))


# -- closed form for tree lines through a common point -----------------------


def _G(c):
    """``int (s - c)_+ e^{-|s|} ds``."""
    c = np.asarray(c, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(c >= 0, np.exp(-c), np.exp(np.minimum(c, 0)) - 2 * np.minimum(c, 0))
    return np.where(np.isposinf(c), 0.0, out)


def tree_fT_through_point(a, b, T):
    """ExpHalf ``f^T`` of two tree lines through one point at time 0.

    ``a`` and ``b`` are the lengths on which the lines agree forward and
    backward from the common point.
    """
    return np.maximum(_G(a) + _G(b), _G(np.asarray(a) - T) + _G(np.asarray(b) + T))


# -- line families ------------------------------------------------------------


class LineFamily:
    """Finite family of lines through an anchor region at time 0."""

    anchor = None
    depth = None
    params = None

    def __len__(self):
        raise NotImplementedError

    def line(self, i):
        raise NotImplementedError

    @property
    def lines(self):
        return [self.line(i) for i in range(len(self))]

    def metric(self, f=EXP_HALF, T=0.0, tol=FAMILY_TOL):
        """Neighborhood oracle for ``f^T`` usable by the greedy cover."""
        raise NotImplementedError


class _Metric:
    def __init__(self, n, within):
        self.n = n
        self._within = within

    def __len__(self):
        return self.n

    def within(self, i, radius, tol=0.0):
        return self._within(i, radius, tol)


class TreeFamily(LineFamily):
    """Tree lines through a point, encoded by non-backtracking direction codes.

    A code sequence lists, step by step, which of the available onward
    edges a ray takes (children in letter order, then the parent).  Rays
    beyond the coded depth continue with code 0.  Two rays agree for
    ``k`` steps exactly when their codes agree on ``k`` positions.
    """

    def __init__(self, space, anchor, forward, backward, first_len, materialize, depth, params):
        self.space = space
        self.anchor = anchor
        self.F = forward
        self.B = backward
        self.first_len = np.asarray(first_len, dtype=float)
        self._materialize = materialize
        self.depth = depth
        self.params = params
        fi, bi = [], []
        bfirst = self.B[:, 0]
        for i, c in enumerate(self.F[:, 0]):
            ok = np.nonzero(bfirst != c)[0]
            fi.append(np.full(ok.size, i))
            bi.append(ok)
        self.lf = np.concatenate(fi) if fi else np.zeros(0, dtype=np.int64)
        self.lb = np.concatenate(bi) if bi else np.zeros(0, dtype=np.int64)
        self._buckets = {}

    def __len__(self):
        return int(self.lf.size)

    def line(self, i):
        return self._materialize(tuple(self.F[self.lf[i]]), tuple(self.B[self.lb[i]]))

    def _agree(self, codes, i, J):
        eq = codes[J] == codes[i]
        k = np.cumprod(eq, axis=1).sum(axis=1)
        n = codes.shape[1]
        first = self.first_len[codes[i, 0]]
        a = np.where(k == 0, 0.0, first + k - 1.0)
        return np.where(k == n, np.inf, a)

    def agreement(self, i, J):
        """Forward and backward agreement lengths between line ``i`` and lines ``J``."""
        J = np.asarray(J, dtype=np.int64)
        a = self._agree(self.F, self.lf[i], self.lf[J])
        b = self._agree(self.B, self.lb[i], self.lb[J])
        return a, b

    def _bucket(self, m):
        if m not in self._buckets:
            base = int(self.F.max()) + 2 if self.F.size else 2
            key = np.zeros(self.lf.size, dtype=np.int64)
            for j in range(m):
                key = key * base + self.F[self.lf, j]
            order = np.argsort(key, kind="stable")
            sk = key[order]
            self._buckets[m] = (key, order, sk)
        return self._buckets[m]

    def metric(self, f=EXP_HALF, T=0.0, tol=FAMILY_TOL):
        if f != EXP_HALF:
            return ListFamily(self.space, self.lines, self.anchor, self.depth).metric(f, T, tol)

        def within(i, radius, slack):
            # f^T <= radius forces forward agreement >= T + 1 - radius
            need = T + 1 - radius - float(self.first_len.max()) + 1
            m = int(min(self.F.shape[1], max(0, ceil(need - 1e-9))))
            key, order, sk = self._bucket(m)
            lo = np.searchsorted(sk, key[i], "left")
            hi = np.searchsorted(sk, key[i], "right")
            J = order[lo:hi]
            a, b = self.agreement(i, J)
            return J[tree_fT_through_point(a, b, T) <= radius + slack]

        return _Metric(len(self), within)


def _tree_step(space, word, came):
    """Onward options from vertex ``word`` reached from ``came``.

    ``came`` is ``"parent"``, a child letter, or ``None`` at the start.
    Options are ``(kind, target)`` with children first.
    """
    top = space.q + 1 if not word else space.q
    opts = [("down", c) for c in range(top) if came is None or came == "parent" or c != came]
    if word and came != "parent":
        opts.append(("up", None))
    return opts


def _tree_ray_end(space, p, codes):
    """End reached from ``p`` by following ``codes`` and then code 0."""
    if p.is_vertex:
        word, came = p.word, None
    else:
        c0 = codes[0]
        if c0 == 0:
            word, came = p.word, "parent"
        else:
            word, came = p.word[:-1], p.word[-1]
        codes = codes[1:]
    for c in codes:
        kind, target = _tree_step(space, word, came)[c]
        if kind == "down":
            word, came = word + (target,), "parent"
        else:
            word, came = word[:-1], word[-1]
    if came == "parent":
        return TreeEnd(word, (0,))
    kind, target = _tree_step(space, word, came)[0]
    return TreeEnd(word + (target,), (0,))


def _enumerate_codes(first, rest, n):
    grids = [np.arange(first)] + [np.arange(rest)] * (n - 1)
    mesh = np.meshgrid(*grids, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(np.int8)


def tree_family(space, p=None, depth=4.0, backward_depth=None):
    """All tree lines through ``p`` coded to ``ceil(depth)`` forward steps."""
    p = space.basepoint if p is None else space.check_point(p)
    nf = max(1, int(ceil(depth - 1e-12)))
    nb = min(nf, 4) if backward_depth is None else int(backward_depth)
    q = space.q
    if p.is_vertex:
        k0 = q + 1
        first_len = [1.0] * k0
    else:
        k0 = 2
        first_len = [1.0 - float(p.offset), float(p.offset)]
    F = _enumerate_codes(k0, q, nf)
    B = _enumerate_codes(k0, q, nb)

    def materialize(fc, bc):
        plus = _tree_ray_end(space, p, fc)
        minus = _tree_ray_end(space, p, bc)
        return space.line_through(p, minus, plus)

    return TreeFamily(space, p, F, B, first_len, materialize, depth,
                      {"forward_depth": nf, "backward_depth": nb})


class AngularFamily(LineFamily):
    """Lines through a point ``p`` at equally spaced forward angles.

    Rotations about ``p`` are isometries, so ``f^T`` depends only on the
    angular gap; the neighborhood of a line is a window of the angle grid.
    """

    def __init__(self, space, p, n, depth=None):
        self.space = space
        self.anchor = p
        self.n = int(n)
        self.depth = depth
        self.params = {"directions": self.n, "mesh": tau / self.n}
        self._windows = {}

    def __len__(self):
        return self.n

    def angle(self, i):
        return tau * i / self.n

    def line(self, i):
        return self.space.line_through(self.anchor, self.angle(i))

    def gap_distance(self, gap, f=EXP_HALF, T=0.0, tol=FAMILY_TOL):
        g0 = self.space.line_through(self.anchor, 0.0)
        g1 = self.space.line_through(self.anchor, gap)
        return f_dynamical_distance(self.space, g0, g1, f, T, tol)

    def window(self, f, T, radius, tol=FAMILY_TOL):
        """Largest angular gap with ``f^T <= radius``."""
        key = (f, float(T), float(radius), tol)
        if key not in self._windows:
            phi = lambda g: self.gap_distance(g, f, T, tol)
            if phi(pi) <= radius:
                w = pi
            else:
                lo, hi = 0.0, pi
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if phi(mid) <= radius:
                        lo = mid
                    else:
                        hi = mid
                w = lo
            self._windows[key] = w
        return self._windows[key]

    def metric(self, f=EXP_HALF, T=0.0, tol=FAMILY_TOL):
        def within(i, radius, slack):
            w = self.window(f, T, radius + slack, tol)
            k = int(floor(w / (tau / self.n) + 1e-9))
            if 2 * k + 1 >= self.n:
                return np.arange(self.n)
            return np.arange(i - k, i + k + 1) % self.n

        return _Metric(self.n, within)


def angular_mesh(space, p, T, r, f=EXP_HALF, factor=5):
    """Angular mesh ``w / factor`` where ``w`` is the ``f^T`` window of radius ``r``."""
    fam = AngularFamily(space, p, 4)
    return fam.window(f, T, r) / factor


class _Traces:
    """Line traces on a fixed time grid for vectorized profiles."""

    def __init__(self, space, lines, s):
        self.space = space
        self.s = s
        kind = space.kind
        self.kind = kind
        if kind == "hyperbolic":
            R, Th = zip(*(g.trace(s) for g in lines))
            self.R = np.array(R)
            self.Th = np.array(Th)
        elif kind == "euclidean":
            self.X = np.array([g.trace(s) for g in lines])
        elif kind == "tree":
            ends = {}
            for g in lines:
                for e in (g.minus, g.plus):
                    ends.setdefault(e, len(ends))
            dmax = max(g.branch_depth for g in lines) + float(np.max(np.abs(s))) + max(
                abs(float(g.shift)) for g in lines) + 2
            K = int(ceil(dmax))
            elist = list(ends)
            Lt = np.array([e.take(K) for e in elist], dtype=np.int16)
            eq = Lt[:, None, :] == Lt[None, :, :]
            self.lcp = np.cumprod(eq, axis=2).sum(axis=2).astype(float)
            side, dep, eid = [], [], []
            for g in lines:
                sd, dp = g.trace(s)
                side.append(sd)
                dep.append(dp)
                eid.append(np.where(sd, ends[g.plus], ends[g.minus]))
            self.dep = np.array(dep)
            self.eid = np.array(eid)
        else:
            self.lines = list(lines)

    def profile(self, i, J, cols):
        if self.kind == "hyperbolic":
            return polar_distance(self.R[i, cols], self.Th[i, cols], self.R[np.ix_(J, cols)],
                                  self.Th[np.ix_(J, cols)])
        if self.kind == "euclidean":
            return np.linalg.norm(self.X[np.ix_(J, cols)] - self.X[i, cols], axis=-1)
        if self.kind == "tree":
            L = self.lcp[self.eid[i, cols], self.eid[np.ix_(J, cols)]]
            d1, d2 = self.dep[i, cols], self.dep[np.ix_(J, cols)]
            return d1 + d2 - 2 * np.minimum(np.minimum(d1, d2), L)
        g = self.lines[i]
        return self.space.line_profiles(g, [self.lines[j] for j in J], self.s[cols])


class ListFamily(LineFamily):
    """Explicit list of lines with brute-force ``f^T`` neighborhoods."""

    def __init__(self, space, lines, anchor=None, depth=None, params=None):
        self.space = space
        self._lines = list(lines)
        self.anchor = anchor
        self.depth = depth
        self.params = params or {}

    def __len__(self):
        return len(self._lines)

    def line(self, i):
        return self._lines[i]

    @property
    def lines(self):
        return list(self._lines)

    def metric(self, f=EXP_HALF, T=0.0, tol=FAMILY_TOL):
        n = len(self._lines)
        if n == 0:
            return _Metric(0, lambda i, r, s: np.zeros(0, dtype=np.int64))
        d0 = max(float(np.max(self.space.line_profiles(g, self._lines[:1], np.array([0.0, T]))))
                 for g in self._lines)
        P = truncation(f, 2 * d0 + 2 * T, tol)
        h = 1 / 16
        N = int(ceil(P / h))
        base = h * np.arange(-N, N + 1)
        shift = int(round(T / h))
        Tq = shift * h
        s = h * np.arange(-N, N + shift + 1)
        tr = _Traces(self.space, self._lines, s)
        w = f(base) * h
        w[0] *= 0.5
        w[-1] *= 0.5
        c0 = np.arange(2 * N + 1)
        c1 = c0 + shift
        allJ = np.arange(n)

        def within(i, radius, slack):
            v0 = tr.profile(i, allJ, c0) @ w
            vT = tr.profile(i, allJ, c1) @ w if Tq > 0 else v0
            return allJ[np.maximum(v0, vT) <= radius + slack]

        return _Metric(n, within)


def generate_line_family(space, anchor=None, mesh=None, depth=4.0, backward_depth=None):
    """Finite family of lines through ``anchor`` at time 0.

    Trees: every line coded by non-backtracking direction words of length
    ``ceil(depth)`` forward and ``min(ceil(depth), 4)`` backward.
    Hyperbolic plane and Euclidean plane: ``ceil(2 pi / mesh)`` lines at
    equally spaced forward angles.  Graphs: extensions of the segments
    from the anchor to a ``mesh``-dense sample of the sphere of radius 1.
    """
    p = space.basepoint if anchor is None else anchor
    if space.kind == "tree":
        return tree_family(space, p, depth, backward_depth)
    if space.kind in ("hyperbolic", "euclidean"):
        if space.kind == "euclidean" and space.dim != 2:
            raise ConfigurationError("angular families need the Euclidean plane")
        if mesh is None or mesh <= 0:
            raise DomainError("an angular family needs a positive mesh")
        return AngularFamily(space, p, int(ceil(tau / mesh - 1e-9)), depth)
    from .spaces import Sphere

    mesh = 0.5 if mesh is None else mesh
    pts = space.sample_region(Sphere(p, 1.0), mesh)
    return ListFamily(space, [space.extend_to_line(p, y) for y in pts], p, depth)


def _check_depth(family, T_list):
    if family.depth is not None and max(T_list) > family.depth + 1e-9:
        raise GenerationDepthError(
            f"T = {max(T_list)} exceeds the generation depth {family.depth}")


def flow_covering_growth(space, family, f=EXP_HALF, r=1.0, T_list=(1.0,), tol=FAMILY_TOL):
    """Greedy ``f^T`` cover counts of the family at scale ``r``."""
    if r <= 0:
        raise DomainError("r must be positive")
    T_list = [float(t) for t in T_list]
    _check_depth(family, T_list)
    vals = [len(greedy_centers(family.metric(f, T, tol), r, 0.0)) for T in T_list]
    return GrowthSeries("FlowCover", r, T_list, vals, {"family_size": len(family)})


def flow_entropy_series(space, r, T_list, anchor=None, f=EXP_HALF, margin=2.0, mesh_factor=20):
    """Build a family deep enough for ``T_list`` and return its cover series."""
    T_list = [float(t) for t in T_list]
    depth = max(T_list) + margin
    p = space.basepoint if anchor is None else anchor
    mesh = None
    if space.kind in ("hyperbolic", "euclidean"):
        mesh = angular_mesh(space, p, max(T_list), r, f, mesh_factor)
    fam = generate_line_family(space, p, mesh, depth)
    return flow_covering_growth(space, fam, f, r, T_list)


# -- key lemma and recurrence -------------------------------------------------


def perturbation_family(space, gamma, T, r2, f=EXP_HALF, mesh=None, tol=FAMILY_TOL):
    """Lines through a point near ``gamma(0)`` and a point near ``gamma(T)``.

    Every line extends a segment ``[y, x']`` with ``y`` in a sample of
    ``B(gamma(0), r2)`` and ``x'`` in a sample of ``B(gamma(T), r2)``, is
    parametrized with time 0 at ``y``, and is kept when its ``f^T``
    distance to ``gamma`` is at most ``r2``.
    """
    mesh = (0.5 if space.kind == "tree" else 1.0) if mesh is None else mesh
    Y = space.sample_region(Ball(gamma(0.0), r2), mesh)
    X = space.sample_region(Ball(gamma(float(T)), r2), mesh)
    cands = [gamma]
    for y in Y:
        for x in X:
            if space.distance(x, y) > 0:
                cands.append(space.extend_to_line(y, x))
    d0 = f_distances(space, gamma, cands, f, tol, 0.0, adaptive=False)
    dT = f_distances(space, gamma, cands, f, tol, float(T), adaptive=False)
    keep = [g for g, a, b in zip(cands, d0, dT) if max(a, b) <= r2]
    return ListFamily(space, keep, gamma, T, {"mesh": mesh, "candidates": len(cands)})


def verify_key_lemma(space, gammas, f=EXP_HALF, r=1.0, r2=2.0, T_list=(4, 6, 8, 10), mesh=None,
                     slope_bound=0.05):
    """Growth of ``Cov_{f^T}(B_{f^T}(gamma, r2), r)`` along ``T`` for each base line.

    Returns a report with the fitted slope per line and the maximum, which
    must not exceed ``slope_bound``.
    """
    if r2 < r:
        raise DomainError("need r2 >= r")
    if not isinstance(gammas, (list, tuple)):
        gammas = [gammas]
    slopes, series = [], []
    for g in gammas:
        counts = []
        for T in T_list:
            fam = perturbation_family(space, g, T, r2, f, mesh)
            counts.append(len(greedy_centers(fam.metric(f, T), r, 0.0)))
        s = GrowthSeries("FlowCover", r, T_list, counts)
        est = fit_entropy(s, "full")
        slopes.append(est.slope)
        series.append(counts)
    return {
        "slopes": slopes,
        "max_slope": max(slopes),
        "counts": series,
        "holds": max(slopes) <= slope_bound,
    }


def verify_no_recurrence(space, family, R, x=None):
    """Lines with ``d(gamma(0), x) <= R`` must satisfy ``d(x, gamma(2R + 1)) > R``."""
    x = space.basepoint if x is None else x
    checked = bad = 0
    for g in family.lines:
        if space.distance(g(0.0), x) <= R:
            checked += 1
            if not space.distance(x, g(2 * R + 1)) > R:
                bad += 1
    return {"checked": checked, "violations": bad, "holds": bad == 0}
