"""Boundary subsets, their quasiconvex hulls and relative growth functions.

Tree subsets are closed end sets given by pruned deterministic automata
over the child letters: an end belongs to the set when the automaton can
read all of it.  Hyperbolic subsets are finite unions of closed arcs of
the circle at infinity, points being arcs of length zero.

In the hyperbolic plane, hull distances are exact.  Seen from a point
``p``, a line whose ideal endpoints are ``phi`` apart in visual angle is at
distance ``arccosh(1 / sin(phi / 2))``.  Hence ``d(p, QC-Hull(C))`` follows
from the largest visual gap between two points of ``C``, which is ``pi``
minus the circular distance between ``C_p`` and its antipodal copy.
"""

import json
from dataclasses import dataclass, field
from math import ceil, floor, pi, tau as TAU

import numpy as np

from .entropy import GrowthSeries
from .errors import (
    BasepointError,
    ConfigurationError,
    DegenerateSubsetError,
    DomainError,
    UnsupportedBoundaryError,
)
from .flow import EXP_HALF, FAMILY_TOL, ListFamily, TreeFamily, flow_covering_growth
from .hyperbolicity import model_delta
from .nets import greedy_cover
from .spaces import Ball, Sphere
from .spaces.base import TOL, region_bounds
from .spaces.hyperbolic import HypPoint, IdealPoint, from_polar, minkowski
from .spaces.tree import TreeEnd, TreePoint, TreeSample

# endpoints recovered from hyperboloid lines carry a few 1e-12 of error
ANGLE_SLACK = 1e-9


# -- tree subsets -------------------------------------------------------------


class Automaton:
    """Deterministic automaton over tree letters, pruned to infinite paths.

    The start state is duplicated so that letter ``q`` (only available at
    the root) is read from the start copy and ignored elsewhere.
    """

    ROOT = "root"

    def __init__(self, q, transitions, start=0):
        delta = {}
        for s, a, t in transitions:
            a = int(a)
            if not 0 <= a <= q:
                raise ConfigurationError(f"letter {a} is outside the alphabet 0..{q}")
            if delta.setdefault(s, {}).setdefault(a, t) != t:
                raise ConfigurationError(f"transition ({s}, {a}) is not deterministic")
        states = {self.ROOT: dict(delta.get(start, {}))}
        for s, out in delta.items():
            states[s] = {a: t for a, t in out.items() if a < q}
        for out in list(states.values()):
            for t in out.values():
                states.setdefault(t, {a: u for a, u in delta.get(t, {}).items() if a < q})
        # prune states without an infinite continuation
        live = set(states)
        changed = True
        while changed:
            changed = False
            for s in list(live):
                if not any(t in live for t in states[s].values()):
                    live.discard(s)
                    changed = True
        if self.ROOT not in live:
            raise DegenerateSubsetError("the automaton accepts no infinite word")
        self.q = q
        self.delta = {
            s: {a: t for a, t in sorted(states[s].items()) if t in live} for s in sorted(live, key=str)
        }
        self._count_cache = {}

    def letters(self, state):
        return list(self.delta[state])

    def step(self, state, letter):
        return self.delta[state].get(letter)

    def walk(self, word, state=ROOT):
        for a in word:
            state = self.delta[state].get(a)
            if state is None:
                return None
        return state

    def count(self, state, n):
        """Number of live words of length ``n`` read from ``state``."""
        key = (state, n)
        if key not in self._count_cache:
            if n <= 0:
                val = 1
            else:
                val = sum(self.count(t, n - 1) for t in self.delta[state].values())
            self._count_cache[key] = val
        return self._count_cache[key]

    def words(self, n, state=ROOT):
        """Live words of length ``n`` from ``state`` in lexicographic order, with end states."""
        level = [((), state)]
        for _ in range(n):
            level = [(w + (a,), t) for w, s in level for a, t in self.delta[s].items()]
        return level

    def min_tail(self, state):
        """Smallest infinite continuation from ``state`` as ``(prefix, period)``."""
        seen = {}
        letters = []
        while state not in seen:
            seen[state] = len(letters)
            a = next(iter(self.delta[state]))
            letters.append(a)
            state = self.delta[state][a]
        k = seen[state]
        return tuple(letters[:k]), tuple(letters[k:])

    def accepts(self, end):
        """Whether the automaton reads the whole eventually periodic end."""
        state = self.walk(end.prefix)
        if state is None:
            return False
        seen = set()
        while state not in seen:
            seen.add(state)
            state = self.walk(end.period, state)
            if state is None:
                return False
        return True


class TreeSubset:
    """Closed end set of a regular tree described by an automaton."""

    def __init__(self, space, automaton):
        if space.kind != "tree":
            raise ConfigurationError("tree subsets need a regular tree")
        if automaton.q != space.q:
            raise ConfigurationError("automaton and tree disagree on the branching")
        self.space = space
        self.automaton = automaton
        self._v0 = None

    def __contains__(self, end):
        return self.automaton.accepts(end)

    def count(self, n):
        """Number of depth-``n`` words with a continuation in the set."""
        return self.automaton.count(Automaton.ROOT, n)

    def end_through(self, word):
        """Smallest end of the set extending ``word``."""
        state = self.automaton.walk(word)
        if state is None:
            raise DomainError(f"{word} has no continuation in the subset")
        pre, per = self.automaton.min_tail(state)
        return TreeEnd(tuple(word) + pre, per)

    @property
    def branch_vertex(self):
        """Deepest word that is a prefix of every end of the set."""
        if self._v0 is None:
            A = self.automaton
            word, state, seen = (), Automaton.ROOT, set()
            while len(A.delta[state]) == 1:
                if state in seen:
                    raise DegenerateSubsetError("the subset has a single point")
                seen.add(state)
                a, state = next(iter(A.delta[state].items()))
                word += (a,)
            self._v0 = (word, state)
        return self._v0[0]

    @property
    def branch_state(self):
        self.branch_vertex
        return self._v0[1]

    def in_hull(self, x):
        """Whether the tree point ``x`` lies on a line joining two ends of the set."""
        v0 = self.branch_vertex
        w = x.word
        if x.is_vertex and w == v0:
            return True
        return len(w) > len(v0) and w[: len(v0)] == v0 and self.automaton.walk(w) is not None


def full_boundary(space):
    """All ends of the space."""
    if space.kind == "tree":
        return TreeSubset(space, Automaton(space.q, [(0, a, 0) for a in range(space.q + 1)]))
    if space.kind == "hyperbolic":
        return ArcSubset([(0.0, TAU)])
    raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def letter_subset(space, letters):
    """Tree ends all of whose letters lie in ``letters``."""
    letters = sorted(set(int(a) for a in letters))
    return TreeSubset(space, Automaton(space.q, [(0, a, 0) for a in letters]))


def finite_tree_subset(space, ends):
    """Finite set of eventually periodic ends as an automaton."""
    ends = [space.check_end(e) for e in ends]
    if not ends:
        raise DegenerateSubsetError("empty subset")

    def norm(e, pos):
        n = len(e.prefix) + len(e.period)
        if pos >= n:
            pos = len(e.prefix) + (pos - len(e.prefix)) % len(e.period)
        return pos

    start = frozenset((i, 0) for i in range(len(ends)))
    ids = {start: 0}
    todo = [start]
    trans = []
    while todo:
        S = todo.pop()
        by_letter = {}
        for i, pos in S:
            by_letter.setdefault(ends[i].letter(pos), set()).add((i, norm(ends[i], pos + 1)))
        for a, nxt in sorted(by_letter.items()):
            nxt = frozenset(nxt)
            if nxt not in ids:
                ids[nxt] = len(ids)
                todo.append(nxt)
            trans.append((ids[S], a, ids[nxt]))
    return TreeSubset(space, Automaton(space.q, trans, start=0))


# -- hyperbolic subsets -------------------------------------------------------


@dataclass(frozen=True)
class ArcSubset:
    """Finite union of closed arcs ``[a, b]`` (counterclockwise) and points."""

    arcs: tuple = ()
    points: tuple = ()

    def __post_init__(self):
        arcs = []
        for a, b in self.arcs:
            a, b = float(a), float(b)
            length = TAU if b - a >= TAU - 1e-15 else (b - a) % TAU
            arcs.append((a % TAU, length))
        arcs += [(float(p) % TAU, 0.0) for p in self.points]
        if not arcs:
            raise DegenerateSubsetError("empty subset")
        object.__setattr__(self, "_starts", np.array([a for a, _ in arcs]))
        object.__setattr__(self, "_lengths", np.array([l for _, l in arcs]))

    @property
    def starts(self):
        return self._starts

    @property
    def lengths(self):
        return self._lengths

    @property
    def is_finite(self):
        return bool(np.all(self._lengths == 0))

    def check_two_points(self):
        pts = np.unique(np.round(self._starts[self._lengths == 0], 12))
        if self._lengths.max() == 0 and len(pts) < 2:
            raise DegenerateSubsetError("the hull needs at least two boundary points")

    def contains(self, theta):
        d = (float(theta) - self._starts) % TAU
        return bool(np.any((d <= self._lengths + ANGLE_SLACK) | (TAU - d <= ANGLE_SLACK)))

    def sample(self, mesh):
        """Points of the set: every point and arcs at spacing at most ``mesh``."""
        out = []
        for a, l in zip(self._starts, self._lengths):
            if l == 0:
                out.append(a)
            else:
                n = max(1, ceil(l / mesh))
                full = l >= TAU
                out.extend(a + l * np.arange(n + (0 if full else 1)) / n)
        return np.unique(np.round(np.asarray(out) % TAU, 12))


def _disk(X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return (X[:, 0] + 1j * X[:, 1]) / (1 + X[:, 2])


def visual_angles(X, thetas):
    """Visual angles of ideal points ``thetas`` seen from hyperboloid points ``X``.

    Uses the disk isometry ``z -> (z - w) / (1 - conj(w) z)`` moving the
    point to the center; the result is an ``(M, K)`` array.
    """
    w = _disk(X)[:, None]
    z = np.exp(1j * np.asarray(thetas, dtype=float))[None, :]
    return np.angle((z - w) / (1 - np.conj(w) * z)) % TAU


def _from_visual(X, angles):
    w = _disk(X)[:, None]
    z = np.exp(1j * np.asarray(angles, dtype=float))
    return np.angle((z + w) / (1 + np.conj(w) * z)) % TAU


def _visual_arcs(C, X):
    S = visual_angles(X, C.starts)
    E = visual_angles(X, C.starts + C.lengths)
    L = (E - S) % TAU
    L = np.where(C.lengths[None, :] == 0, 0.0, L)
    L = np.where(C.lengths[None, :] >= TAU, TAU, L)
    return S, L


def _arc_gap(a, la, b, lb):
    """Circular distance between arcs ``[a, a + la]`` and ``[b, b + lb]``."""
    d1 = (b - a) % TAU
    d2 = (a - b) % TAU
    meet = (d1 <= la + 1e-15) | (d2 <= lb + 1e-15)
    gap = np.minimum((b - a - la) % TAU, (a - b - lb) % TAU)
    return np.where(meet, 0.0, gap)


def _antipodal_gaps(C, X):
    S, L = _visual_arcs(C, X)
    A = S[:, :, None]
    LA = L[:, :, None]
    B = (S[:, None, :] + pi) % TAU
    LB = L[:, None, :]
    G = _arc_gap(A, LA, B, LB)
    return G, S, L


def hull_distance(space, C, X, chunk=20000):
    """Exact distance from hyperboloid points ``X`` to the hull of an arc subset."""
    C.check_two_points()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.empty(len(X))
    for lo in range(0, len(X), chunk):
        G, _, _ = _antipodal_gaps(C, X[lo: lo + chunk])
        dmin = G.reshape(len(G), -1).min(axis=1)
        c = np.cos(dmin / 2)
        with np.errstate(divide="ignore"):
            out[lo: lo + chunk] = np.where(c <= 1e-300, np.inf, np.arccosh(np.maximum(1.0, 1 / np.maximum(c, 1e-300))))
    return out


def hull_witness_pair(space, C, x):
    """Ideal endpoints in ``C`` of a hull line closest to ``x``."""
    X = np.atleast_2d(x.array)
    G, S, L = _antipodal_gaps(C, X)
    G = G[0]
    i, j = np.unravel_index(np.argmin(G), G.shape)
    a, la = S[0, i], L[0, i]
    b, lb = (S[0, j] + pi) % TAU, L[0, j]
    # u lies in arc i and v in the antipodal copy of arc j
    if G[i, j] == 0:
        u = b if (b - a) % TAU <= la + 1e-15 else a
        v = u
    elif (b - a - la) % TAU <= (a - b - lb) % TAU:
        u, v = a + la, b
    else:
        u, v = a, b + lb
    back = _from_visual(X, [u, v - pi])[0]
    return IdealPoint(back[1]), IdealPoint(back[0])


def projection_time(line, x):
    """Time at which ``line`` is closest to ``x``."""
    p = np.asarray(line.p)
    v = np.asarray(line.v)
    lp, lm = p + v, p - v
    return 0.5 * float(np.log(minkowski(lm, x.array) / minkowski(lp, x.array)))


def _hyp_hull_line(space, C, x):
    zm, zp = hull_witness_pair(space, C, x)
    g = space.line_from_boundary_pair(zm, zp)
    return g.shifted(projection_time(g, x))


# -- loading ----------------------------------------------------------------


def load_subset(source, space):
    """Read a subset from a JSON file path, JSON text or a parsed dict.

    Trees use ``{"type": "automaton", "alphabet": k, "transitions":
    [[state, letter, state], ...], "accepting_cycles": true}`` with an
    optional ``"start"`` (default 0).  The hyperbolic plane uses
    ``{"type": "arcs", "arcs": [[a, b], ...]}`` with an optional
    ``"points"`` list, angles in radians.
    """
    if isinstance(source, dict):
        spec = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        spec = json.loads(text)
    kind = spec.get("type")
    if kind == "automaton":
        if space.kind != "tree":
            raise ConfigurationError("automaton subsets need a tree")
        allowed = {"type", "alphabet", "transitions", "accepting_cycles", "start"}
        extra = set(spec) - allowed
        if extra:
            raise ConfigurationError(f"unknown subset key {sorted(extra)[0]!r}")
        if not spec.get("accepting_cycles", True):
            raise UnsupportedBoundaryError("only closed subsets (accepting cycles) are supported")
        k = int(spec.get("alphabet", space.q + 1))
        if k > space.q + 1:
            raise ConfigurationError(f"alphabet {k} exceeds the {space.q + 1} tree letters")
        return TreeSubset(space, Automaton(space.q, spec["transitions"], spec.get("start", 0)))
    if kind == "arcs":
        if space.kind != "hyperbolic":
            raise ConfigurationError("arc subsets need the hyperbolic plane")
        extra = set(spec) - {"type", "arcs", "points"}
        if extra:
            raise ConfigurationError(f"unknown subset key {sorted(extra)[0]!r}")
        return ArcSubset(tuple(map(tuple, spec.get("arcs", []))), tuple(spec.get("points", [])))
    raise ConfigurationError(f"unknown subset type {kind!r}")


# -- hull samples -----------------------------------------------------------


@dataclass
class HullSample:
    """Mesh-dense sample of ``B(QC-Hull(C), tau)`` inside a region."""

    region: object
    points: list
    tau: float
    sample: object = field(repr=False)
    _witness: object = field(repr=False, default=None)

    def __len__(self):
        return len(self.points)

    def witness(self, i):
        """``(line, t)`` with both line ends in the subset and ``d(point, line(t)) <= tau``."""
        return self._witness(self.sample.point(i))


def _tree_hull_line(C, h):
    """A line through the hull point ``h`` with both ends in ``C``."""
    space = C.space
    v0 = C.branch_vertex
    A = C.automaton
    s0 = C.branch_state
    letters = A.letters(s0)
    if h.is_vertex and h.word == v0:
        plus = C.end_through(v0 + (letters[0],))
        minus = C.end_through(v0 + (letters[1],))
    else:
        plus = C.end_through(h.word)
        own = h.word[len(v0)]
        other = next(a for a in letters if a != own)
        minus = C.end_through(v0 + (other,))
    return space.line_through(h, minus, plus)


class _TreeHull:
    """Hull vertices and their ``tau``-fringe with distances to a center."""

    def __init__(self, C, center, radius, tau_):
        space = C.space
        A = C.automaton
        v0 = C.branch_vertex
        s0 = C.branch_state
        self.C = C
        dist = lambda w: float(space.distance(center, TreePoint(w, 1) if w else TreePoint((), 0)))
        dv0 = dist(v0)
        hull = {v0: s0}
        frontier = [(v0, s0)]
        reach = radius + 1 + TOL
        while frontier:
            nxt = []
            for w, s in frontier:
                for a, t in A.delta[s].items():
                    u = w + (a,)
                    if len(u) - len(v0) <= dv0 + reach:
                        hull[u] = t
                        nxt.append((u, t))
            frontier = nxt
        # fringe by BFS away from the hull
        dh = {w: 0 for w in hull}
        anchor = {w: w for w in hull}
        queue = list(hull)
        limit = tau_ + 1 + TOL
        while queue:
            nxt = []
            for w in queue:
                if dh[w] + 1 > limit:
                    continue
                top = space.q + 1 if not w else space.q
                nbrs = [w + (c,) for c in range(top)] + ([w[:-1]] if w else [])
                for u in nbrs:
                    if u in dh:
                        continue
                    if len(u) > len(v0) + dv0 + reach + limit:
                        continue
                    dh[u] = dh[w] + 1
                    anchor[u] = anchor[w]
                    nxt.append(u)
            queue = nxt
        self.dh = dh
        self.anchor = anchor
        self.hull = hull
        self.dx = {w: dist(w) for w in dh}
        self.center = center
        self.edges = sorted(w for w in dh if w and w[:-1] in dh)

    def edge_arrays(self):
        E = self.edges
        dxp = np.array([self.dx[w[:-1]] for w in E])
        dxw = np.array([self.dx[w] for w in E])
        dhp = np.array([self.dh[w[:-1]] for w in E], dtype=float)
        dhw = np.array([self.dh[w] for w in E], dtype=float)
        return dxp, dxw, dhp, dhw


def _sublevel(v0, v1, level):
    """Sub-interval of ``[0, 1]`` where the linear ``v0 + (v1 - v0) a <= level``."""
    s = v1 - v0
    with np.errstate(divide="ignore", invalid="ignore"):
        cut = np.clip((level - v0) / np.where(s == 0, 1, s), 0, 1)
    lo = np.where(s < 0, cut, 0.0)
    hi = np.where(s > 0, cut, 1.0)
    flat_ok = v0 <= level + TOL
    lo = np.where(s == 0, np.where(flat_ok, 0.0, 1.0), lo)
    hi = np.where(s == 0, np.where(flat_ok, 1.0, 0.0), hi)
    return lo, hi


def _tree_hull_sample(C, region, mesh, tau_):
    space = C.space
    c, lo, hi = region_bounds(region)
    if not c.is_vertex:
        raise BasepointError("tree hull regions need a vertex center")
    H = _TreeHull(C, c, hi, tau_)
    m = max(1, ceil(1 / mesh - 1e-12))
    pts = set()
    exact_sphere = isinstance(region, Sphere)
    for w in H.edges:
        p = w[:-1]
        dxp, dxw = H.dx[p], H.dx[w]
        dhp, dhw = H.dh[p], H.dh[w]
        in_hull = dhp == 0 and dhw == 0
        fx = lambda a: dxp + (dxw - dxp) * a
        fh = lambda a: 0.0 if in_hull else dhp + (dhw - dhp) * a
        cands = [] if exact_sphere else [k / m for k in range(1, m + 1)]
        for level in {lo, hi}:
            if dxw != dxp:
                cands.append((level - dxp) / (dxw - dxp))
        if not in_hull and dhw != dhp:
            cands.append((tau_ - dhp) / (dhw - dhp))
        for a in cands:
            if 0 < a <= 1 + 1e-15 and lo - TOL <= fx(a) <= hi + TOL and fh(a) <= tau_ + TOL:
                pts.add(TreePoint(w, _snap(min(a, 1.0))))
    if () in H.dh and H.dh[()] <= tau_ + TOL and lo - TOL <= H.dx[()] <= hi + TOL:
        pts.add(TreePoint((), 0))
    pts = sorted(pts)
    sample = TreeSample(space, pts, center=c, region=region)

    def witness(x):
        w = x.word
        if C.in_hull(x):
            h = x
        else:
            # nearest hull vertex: the anchor of the far endpoint of the edge
            ends = [u for u in (w, w[:-1]) if u in H.anchor]
            h_word = H.anchor[ends[0]]
            h = TreePoint(h_word, 1) if h_word else TreePoint((), 0)
        g = _tree_hull_line(C, h)
        return g, 0.0

    return HullSample(region, list(sample), tau_, sample, witness)


def _snap(a):
    from fractions import Fraction

    f = Fraction(a).limit_denominator(1 << 20)
    return f if abs(float(f) - a) < 1e-15 else a


def _hyp_hull_sample(space, C, region, mesh, tau_):
    C.check_two_points()
    c, lo, hi = region_bounds(region)
    if tau_ == 0 and C.is_finite:
        pts = np.unique(np.round(C.starts, 12))
        rows = []
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                g = space.line_from_boundary_pair(pts[i], pts[j])
                t0 = projection_time(g, c)
                d0 = space.distance(c, g(t0))
                if d0 > hi + TOL:
                    continue
                span = np.arccosh(max(1.0, np.cosh(hi) / np.cosh(d0))) if d0 <= hi else 0.0
                n = max(1, ceil(2 * span / mesh))
                ts = t0 + np.linspace(-span, span, n + 1)
                X = g.coords(ts)
                d = np.array([space.distance(c, HypPoint(tuple(x))) for x in X])
                rows.append(X[(d >= lo - TOL) & (d <= hi + TOL)])
        X = np.vstack(rows) if rows else np.zeros((0, 3))
        sample = space.make_sample([HypPoint(tuple(x)) for x in X], center=c, region=region)
    else:
        base = space.sample_region(region, mesh)
        keep = hull_distance(space, C, base.coords) <= tau_ + 1e-9
        sample = space.make_sample([HypPoint(tuple(x)) for x in base.coords[keep]], center=c,
                                   region=region)
    return HullSample(region, list(sample), tau_, sample,
                      lambda x: (_hyp_hull_line(space, C, x), 0.0))


def qc_hull_sample(space, C, region, mesh=0.5, tau=1.0):
    """Sample of the ``tau``-neighborhood of the quasiconvex hull inside ``region``.

    Trees: exact edge enumeration of the subtree spanned by the set plus
    its ``tau``-fringe, with points at multiples of ``1 / ceil(1 / mesh)``
    and at the crossings of the bounding spheres and of the fringe level.
    Hyperbolic plane: a region sample filtered by the exact hull distance;
    for finite sets and ``tau = 0`` the traces of the connecting lines.
    """
    if mesh <= 0 or tau < 0:
        raise DomainError("need mesh > 0 and tau >= 0")
    if space.kind == "tree":
        C.branch_vertex
        return _tree_hull_sample(C, region, mesh, tau)
    if space.kind == "hyperbolic":
        return _hyp_hull_sample(space, C, region, mesh, tau)
    raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def hull_vertices(C, depth):
    """Hull vertices within ``depth`` below the branch vertex (trees)."""
    v0 = C.branch_vertex
    out = [v0]
    for n in range(1, int(floor(depth)) + 1):
        out.extend(v0 + w for w, _ in C.automaton.words(n, C.branch_state))
    return out


def default_basepoint(space, C):
    """A point of the hull: the branch vertex in trees, the hull point nearest ``o`` in H^2."""
    if space.kind == "tree":
        v0 = C.branch_vertex
        return TreePoint(v0, 1) if v0 else TreePoint((), 0)
    if space.kind == "hyperbolic":
        C.check_two_points()
        o = space.basepoint
        if hull_distance(space, C, o.array)[0] <= 1e-12:
            return o
        return _hyp_hull_line(space, C, o)(0.0)
    raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def _basepoint(space, C, x):
    if x is None:
        return default_basepoint(space, C)
    if space.kind == "tree":
        if not (x.is_vertex and C.in_hull(x)):
            raise BasepointError("the basepoint must be a hull vertex")
    elif space.kind == "hyperbolic":
        if hull_distance(space, C, x.array)[0] > 1e-9:
            raise BasepointError("the basepoint must lie in the hull")
    return x


# -- relative growth ----------------------------------------------------------


def relative_covering_growth(space, C, x=None, r=0.5, T_list=(1.0,), tau=1.0, mesh=None):
    """Greedy ``r``-cover counts of ``B(x, T)`` intersected with the ``tau``-hull."""
    if r <= 0:
        raise DomainError("r must be positive")
    x = _basepoint(space, C, x)
    mesh = r / 2 if mesh is None else mesh
    vals, sizes = [], []
    for T in T_list:
        hs = qc_hull_sample(space, C, Ball(x, float(T)), mesh, tau)
        vals.append(len(greedy_cover(hs.sample, r)))
        sizes.append(len(hs))
    return GrowthSeries("BallCover", r, T_list, vals,
                        {"tau": tau, "mesh": mesh, "sample_sizes": sizes})


def _circle_cover_count(S, L, width):
    """Fewest open arcs of length ``width`` covering a union of closed arcs."""
    order = np.argsort(S, kind="stable")
    S, L = S[order], L[order]
    if np.any(L >= TAU):
        return int(floor(TAU / width)) + 1
    # merge overlapping arcs on the circle
    merged = []
    for a, l in zip(S, L):
        if merged and a <= merged[-1][1] + 1e-15:
            merged[-1][1] = max(merged[-1][1], a + l)
        else:
            merged.append([a, a + l])
    if len(merged) > 1 and merged[-1][1] - TAU >= merged[0][0] - 1e-15:
        first = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], first[1] + TAU)
    if merged[-1][1] - merged[0][0] >= TAU - 1e-15 and len(merged) == 1:
        return int(floor(TAU / width)) + 1
    # cut at the start of the component following the largest gap
    gaps = [(merged[(i + 1) % len(merged)][0] - merged[i][1]) % TAU for i in range(len(merged))]
    k = (int(np.argmax(gaps)) + 1) % len(merged)
    comps = merged[k:] + [[a + TAU, b + TAU] for a, b in merged[:k]]
    count = 0
    u = comps[0][0]
    idx = 0
    while True:
        count += 1
        reach = u + width
        while idx < len(comps) and comps[idx][1] < reach:
            idx += 1
        if idx == len(comps):
            return count
        u = max(reach, comps[idx][0])


def minkowski_count(space, C, x, T):
    """Fewest visual balls of radius ``e^-T`` about ``x`` covering ``C``."""
    if space.kind == "tree":
        return _tree_minkowski(C, x, T)
    if space.kind == "hyperbolic":
        if T <= 0:
            return 1
        S, L = _visual_arcs(C, x.array)
        half = 2 * np.arcsin(np.exp(-T))
        return _circle_cover_count(S[0], L[0], 2 * half)
    raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def _tree_minkowski(C, x, T):
    A = C.automaton
    v0 = C.branch_vertex
    w = x.word
    k = int(floor(T)) + 1 if T >= 0 else 0
    state = A.walk(w)
    total = A.count(state, k)
    U = len(w) - len(v0)
    for u in range(1, min(U, k - 1) + 1):
        a = w[: len(w) - u]
        sa = A.walk(a)
        nxt = w[len(w) - u]
        total += sum(A.count(t, k - u - 1) for b, t in A.delta[sa].items() if b != nxt)
    if U >= k:
        total += 1
    return total


def relative_minkowski_growth(space, C, x=None, T_list=(1.0,)):
    """Visual Minkowski counts of ``C`` seen from a hull point ``x``.

    Trees count depth classes of words exactly; in the hyperbolic plane the
    balls are visual arcs of half-width ``2 arcsin(e^-T)`` about ``x`` and
    the count is the optimal greedy arc cover.
    """
    x = _basepoint(space, C, x)
    vals = [minkowski_count(space, C, x, float(T)) for T in T_list]
    return GrowthSeries("BoundaryCover", float("nan"), T_list, vals)


def relative_measure(space, C, x, T, tau=1.0, resolution=0.05):
    """``mu(B(x, T) ∩ B(QC-Hull(C), tau))``.

    Exact edge-length sums for trees; a polar midpoint rule about ``x`` of
    step ``resolution`` in the hyperbolic plane.
    """
    if space.kind == "tree":
        H = _TreeHull(C, x, T, tau)
        if not H.edges:
            return 0.0
        dxp, dxw, dhp, dhw = H.edge_arrays()
        lo1, hi1 = _sublevel(dxp, dxw, T)
        inside = (dhp == 0) & (dhw == 0)
        lo2, hi2 = _sublevel(np.where(inside, 0, dhp), np.where(inside, 0, dhw), tau)
        return float(np.maximum(0.0, np.minimum(hi1, hi2) - np.maximum(lo1, lo2)).sum())
    if space.kind == "hyperbolic":
        return _hyp_relative_measure(space, C, x, [T], tau, resolution)[0]
    raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def _hyp_relative_measure(space, C, x, T_list, tau_, resolution):
    # move x to the origin: C seen from x
    S, L = _visual_arcs(C, x.array)
    Cx = ArcSubset(tuple((a, a + l) if l < TAU else (0.0, TAU) for a, l in zip(S[0], L[0]) if l > 0),
                   tuple(a for a, l in zip(S[0], L[0]) if l == 0))
    Tmax = max(T_list)
    nr = max(1, ceil(Tmax / resolution))
    dr = Tmax / nr
    radii = (np.arange(nr) + 0.5) * dr
    ring = np.zeros(nr)
    for k, rho in enumerate(radii):
        n = max(16, ceil(TAU * np.sinh(rho) / resolution))
        th = (np.arange(n) + 0.5) * TAU / n
        X = from_polar(np.full(n, rho), th)
        frac = np.mean(hull_distance(space, Cx, X) <= tau_)
        ring[k] = frac * TAU * np.sinh(rho) * dr
    cum = np.cumsum(ring)
    return [float(cum[radii <= T + 1e-12][-1]) if np.any(radii <= T) else 0.0 for T in T_list]


def relative_measure_growth(space, C, measure=None, x=None, tau=1.0, T_list=(1.0,), resolution=0.05):
    """Series of :func:`relative_measure` values."""
    x = _basepoint(space, C, x)
    if measure is not None and measure.kind != space.kind:
        raise ConfigurationError("measure and space disagree")
    if space.kind == "hyperbolic":
        vals = _hyp_relative_measure(space, C, x, [float(T) for T in T_list], tau, resolution)
    else:
        vals = [relative_measure(space, C, x, float(T), tau) for T in T_list]
    return GrowthSeries("BallMeasure", float("nan"), T_list, vals, {"tau": tau})


def relative_line_family(space, C, x=None, depth=4.0, backward_depth=None, anchor_radius=None,
                         mesh=0.05):
    """Lines with both ends in ``C`` through the anchor ball about a hull point.

    Trees have ``delta = 0`` so the anchor is the branch vertex and the
    family is coded by live words below it.  In the hyperbolic plane the
    ends are sampled at spacing ``mesh`` and a line is kept when it passes
    within ``anchor_radius`` (default ``max(22 delta, 14 delta)``) of ``x``,
    with time 0 at its closest point.
    """
    x = _basepoint(space, C, x)
    if space.kind == "tree":
        if x.word != C.branch_vertex:
            raise BasepointError("tree relative families are anchored at the branch vertex")
        A = C.automaton
        s0 = C.branch_state
        v0 = C.branch_vertex
        nf = max(1, int(ceil(depth - 1e-12)))
        nb = min(nf, 4) if backward_depth is None else int(backward_depth)
        F = np.array([w for w, _ in A.words(nf, s0)], dtype=np.int8)
        B = np.array([w for w, _ in A.words(nb, s0)], dtype=np.int8)

        def materialize(fc, bc):
            plus = C.end_through(v0 + fc)
            minus = C.end_through(v0 + bc)
            return space.line_through(x, minus, plus)

        return TreeFamily(space, x, F, B, np.ones(space.q + 1), materialize, depth,
                          {"forward_depth": nf, "backward_depth": nb})
    if space.kind == "hyperbolic":
        C.check_two_points()
        delta = model_delta(space)
        rho = max(22 * delta, 14 * delta) if anchor_radius is None else anchor_radius
        ends = C.sample(mesh)
        lines = []
        for a in ends:
            for b in ends:
                if a == b:
                    continue
                g = space.line_from_boundary_pair(a, b)
                g = g.shifted(projection_time(g, x))
                if space.distance(x, g(0.0)) <= rho + TOL:
                    lines.append(g)
        return ListFamily(space, lines, x, depth, {"anchor_radius": rho, "mesh": mesh})
    raise UnsupportedBoundaryError(f"{space!r} has no boundary support")


def relative_flow_growth(space, C, f=EXP_HALF, r=1.0, T_list=(1.0,), x=None, margin=2.0,
                         **family_kw):
    """``f^T`` cover counts of the relative line family."""
    T_list = [float(t) for t in T_list]
    fam = relative_line_family(space, C, x, max(T_list) + margin, **family_kw)
    return flow_covering_growth(space, fam, f, r, T_list, FAMILY_TOL)


def verify_ray_line_approximation(space, C, x, probes, t_max=10.0, step=0.5, delta=None):
    """Hull lines shadowing rays from a hull point ``x`` to points of ``C``.

    For each probe ``z`` a line ``gamma`` with ends in ``C`` and
    ``gamma(0)`` nearest ``x`` is chosen, and ``d(xi(t), gamma(t))`` is
    checked against ``22 delta`` on a grid up to ``t_max``.
    """
    x = _basepoint(space, C, x)
    delta = (0.0 if space.kind == "tree" else model_delta(space)) if delta is None else delta
    bound = 22 * delta
    ts = np.arange(0.0, t_max + step / 2, step)
    worst = 0.0
    bad = 0
    for z in probes:
        if space.kind == "tree":
            v0 = C.branch_vertex
            A = C.automaton
            w = x.word
            if z.take(len(w)) != w:
                minus = C.end_through(w)
            elif w == v0:
                own = z.letter(len(v0))
                other = next(a for a in A.letters(C.branch_state) if a != own)
                minus = C.end_through(v0 + (other,))
            else:
                own = w[len(v0)]
                other = next(a for a in A.letters(C.branch_state) if a != own)
                minus = C.end_through(v0 + (other,))
            cands = [space.line_through(x, minus, z)]
        else:
            zt = z.theta
            others = C.sample(0.05)
            far = others[np.argsort(-np.abs(np.angle(np.exp(1j * (others - zt)))))[:2]]
            cands = []
            for e in far:
                g = space.line_from_boundary_pair(e, zt)
                cands.append(g.shifted(projection_time(g, x)))
        best = min(
            max(space.distance(space.ray_point(x, z, t), g(t)) for t in ts) for g in cands)
        worst = max(worst, best)
        if best > bound + 1e-9:
            bad += 1
    return {"bound": bound, "max_distance": worst, "violations": bad, "holds": bad == 0}
