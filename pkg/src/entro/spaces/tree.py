"""The regular tree of degree ``q + 1`` with unit edges.

Vertices are words over the alphabet ``{0, ..., q}`` (first letter) and
``{0, ..., q - 1}`` (later letters); the empty word is the root.  A point is
``(word, offset)`` with ``offset in (0, 1]`` measured from the parent of
``word`` towards ``word``; the root is ``((), 0)``.  A point therefore sits at
depth ``len(word) - 1 + offset`` and lies on the root ray of ``word``.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd, inf

import numpy as np

from ..errors import (
    DegeneratePairError,
    DegenerateSegmentError,
    DomainError,
    ModelMismatchError,
)
from .base import (
    DEFAULT_CAP,
    TOL,
    Sample,
    Sphere,
    check_cap,
    greedy_order,
    region_bounds,
)


def _num(a):
    if isinstance(a, (int, np.integer)):
        return Fraction(int(a))
    if isinstance(a, Fraction):
        return a
    return float(a)


@dataclass(frozen=True, order=True)
class TreePoint:
    """A point of a regular tree, see the module docstring."""

    word: tuple
    offset: object = 1

    def __post_init__(self):
        word = tuple(int(c) for c in self.word)
        off = _num(self.offset)
        if not word:
            if off != 0:
                raise DomainError("the root has offset 0")
        elif off < 0 or off > 1:
            raise DomainError("offset must lie in [0, 1]")
        elif off == 0:
            word = word[:-1]
            off = Fraction(1) if word else Fraction(0)
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "offset", off)

    @property
    def depth(self):
        if not self.word:
            return self.offset
        return len(self.word) - 1 + self.offset

    @property
    def is_vertex(self):
        return not self.word or self.offset == 1


ROOT = TreePoint((), 0)


def _minimal_period(period):
    n = len(period)
    for p in range(1, n + 1):
        if n % p == 0 and period == period[:p] * (n // p):
            return period[:p]
    return period


@dataclass(frozen=True)
class TreeEnd:
    """An eventually periodic end ``prefix + period + period + ...``.

    The representation is reduced on construction, so two ends are equal
    exactly when their infinite words agree.
    """

    prefix: tuple
    period: tuple

    def __post_init__(self):
        prefix = tuple(int(c) for c in self.prefix)
        period = tuple(int(c) for c in self.period)
        if not period:
            raise DomainError("an end needs a nonempty period")
        period = _minimal_period(period)
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = (period[-1],) + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def letter(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def take(self, n):
        return tuple(self.letter(i) for i in range(n))

    def __repr__(self):
        p = "".join(map(str, self.prefix))
        c = "".join(map(str, self.period))
        return f"TreeEnd({p}({c}))"


def _take(src, n):
    if isinstance(src, TreeEnd):
        return src.take(n)
    if n > len(src):
        raise DomainError("word too short")
    return tuple(src[:n])


def lcp(a, b):
    """Longest common prefix length of two words or ends (``inf`` if equal ends)."""
    if isinstance(a, TreeEnd) and isinstance(b, TreeEnd):
        if a == b:
            return inf
        la, lb = len(a.period), len(b.period)
        bound = max(len(a.prefix), len(b.prefix)) + la * lb // gcd(la, lb)
        for i in range(bound):
            if a.letter(i) != b.letter(i):
                return i
        return inf  # pragma: no cover - unreachable for reduced ends
    if isinstance(a, TreeEnd):
        a, b = b, a
    n = len(a) if isinstance(b, TreeEnd) else min(len(a), len(b))
    get_b = b.letter if isinstance(b, TreeEnd) else b.__getitem__
    for i in range(n):
        if a[i] != get_b(i):
            return i
    return n


def point_on(src, depth):
    """The point at ``depth`` on the root ray following ``src``."""
    if depth <= 0:
        return ROOT
    n = ceil(depth)
    return TreePoint(_take(src, n), depth - (n - 1))


@dataclass(frozen=True)
class TreeLine:
    """Bi-infinite line from ``minus`` to ``plus``.

    Time ``t`` sits at signed position ``u = t + shift`` from the branch
    vertex (the projection of the root): ``u >= 0`` on the ``plus`` side.
    """

    minus: TreeEnd
    plus: TreeEnd
    shift: float = 0.0

    def __post_init__(self):
        if self.minus == self.plus:
            raise DegeneratePairError("a line needs two distinct ends")
        object.__setattr__(self, "shift", _num(self.shift))
        object.__setattr__(self, "_k", lcp(self.minus, self.plus))

    @property
    def branch_depth(self):
        return self._k

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        u = t + self.shift
        k = self.branch_depth
        if u >= 0:
            return point_on(self.plus, k + u)
        return point_on(self.minus, k - u)

    def shifted(self, t):
        """The reparametrized line ``s -> self(s + t)``."""
        return TreeLine(self.minus, self.plus, self.shift + _num(t))

    def trace(self, s):
        """Vectorized ``(side, depth)`` of the line at times ``s``."""
        u = np.asarray(s, dtype=float) + float(self.shift)
        return u >= 0, self.branch_depth + np.abs(u)


class RegularTree:
    """Regular tree in which every vertex has degree ``q + 1``.

    Parameters
    ----------
    q : int
        Number of children of a non-root vertex, at least 2.
    packing_params : tuple, optional
        ``(P0, r0)`` packing constants.
    cap : int
        Maximal number of points produced by one region sample.
    """

    kind = "tree"
    approximate = False

    def __init__(self, q=2, packing_params=None, delta_hint=0.0, cap=DEFAULT_CAP):
        if int(q) != q or q < 2:
            raise DomainError("branching must be ≥ 2")
        self.q = int(q)
        self.packing_params = packing_params
        self.delta_hint = 0.0 if delta_hint is None else float(delta_hint)
        self.cap = int(cap)
        self.basepoint = ROOT

    def __repr__(self):
        return f"RegularTree({self.q})"

    def __eq__(self, other):
        return isinstance(other, RegularTree) and other.q == self.q

    def __hash__(self):
        return hash(("tree", self.q))

    # -- construction and validation ---------------------------------------

    def _check_word(self, word, start=0):
        for i, c in enumerate(word, start):
            top = self.q if i == 0 else self.q - 1
            if not 0 <= c <= top:
                raise DomainError(f"letter {c} invalid at position {i} for branching {self.q}")

    def point(self, word, offset=1):
        p = TreePoint(tuple(word), offset if word else 0)
        self._check_word(p.word)
        return p

    def vertex(self, word):
        return self.point(word, 1)

    def end(self, prefix, period):
        z = TreeEnd(tuple(prefix), tuple(period))
        self.check_end(z)
        return z

    def check_point(self, x):
        if not isinstance(x, TreePoint):
            raise ModelMismatchError(f"{x!r} is not a tree point")
        self._check_word(x.word)
        return x

    def check_end(self, z):
        if not isinstance(z, TreeEnd):
            raise ModelMismatchError(f"{z!r} is not a tree end")
        self._check_word(z.prefix)
        self._check_word(z.period, start=max(1, len(z.prefix)))
        if not z.prefix and z.period[0] > self.q:
            raise DomainError("invalid first letter")
        return z

    def check_line(self, g):
        if not isinstance(g, TreeLine):
            raise ModelMismatchError(f"{g!r} is not a tree line")
        return g

    # -- metric ------------------------------------------------------------

    def distance(self, x, y):
        self.check_point(x)
        self.check_point(y)
        dx, dy = x.depth, y.depth
        return dx + dy - 2 * min(dx, dy, lcp(x.word, y.word))

    def gromov_product(self, x, y, z):
        return (self.distance(x, y) + self.distance(x, z) - self.distance(y, z)) / 2

    def bicombing(self, x, y, t):
        if not 0 <= t <= 1:
            raise DomainError("t must lie in [0, 1]")
        d = self.distance(x, y)
        dx, dy = x.depth, y.depth
        g = min(dx, dy, lcp(x.word, y.word))
        s = _num(t) * d
        up = dx - g
        if s <= up:
            return point_on(x.word, dx - s)
        return point_on(y.word, g + (s - up))

    def _continue(self, a, b):
        """End reached by walking from ``a`` through ``b`` and beyond."""
        g = min(a.depth, b.depth, lcp(a.word, b.word))
        if b.depth > g:
            return TreeEnd(b.word, (0,))
        # arriving at b from below
        if b.is_vertex:
            w = b.word
            came = a.word[len(w)]
        else:
            w = b.word[:-1]
            came = b.word[-1]
        nxt = 0 if came != 0 else 1
        return TreeEnd(w + (nxt,), (0,))

    def _position(self, x, minus, plus):
        k = lcp(minus, plus)
        if x.depth >= k and lcp(x.word, plus) >= len(x.word):
            return x.depth - k
        return -(x.depth - k)

    def extend_to_line(self, x, y):
        """Line through ``x`` (time 0) and ``y`` (time ``d(x, y)``)."""
        self.check_point(x)
        self.check_point(y)
        if x == y:
            raise DegenerateSegmentError("cannot extend a degenerate segment")
        plus = self._continue(x, y)
        minus = self._continue(y, x)
        return TreeLine(minus, plus, self._position(x, minus, plus))

    def line_through(self, p, minus, plus):
        """Line from ``minus`` to ``plus`` reparametrized so that time 0 is ``p``."""
        return TreeLine(minus, plus, self._position(p, minus, plus))

    def line_from_boundary_pair(self, zminus, zplus):
        self.check_end(zminus)
        self.check_end(zplus)
        if zminus == zplus:
            raise DegeneratePairError("boundary points must differ")
        return TreeLine(zminus, zplus, 0)

    def endpoints(self, line):
        return line.minus, line.plus

    # -- rays and boundary -------------------------------------------------

    def ray_point(self, x, z, t):
        """Point at time ``t`` of the ray from ``x`` to the end ``z``."""
        dx = x.depth
        g = min(dx, lcp(x.word, z))
        up = dx - g
        if t <= up:
            return point_on(x.word, dx - t)
        return point_on(z, g + (t - up))

    def boundary_product(self, z, w, x=None):
        x = self.basepoint if x is None else x
        if z == w:
            return inf
        dx = x.depth
        g = min(dx, lcp(x.word, z))
        h = min(dx, lcp(x.word, w))
        if g != h:
            return dx - max(g, h)
        return (dx - g) + (lcp(z, w) - g)

    def point_end_product(self, y, z, x=None):
        """``(y, z)_x`` for a point ``y`` and an end ``z``."""
        x = self.basepoint if x is None else x
        t = self.distance(x, y) + 1
        return self.gromov_product(x, y, self.ray_point(x, z, t))

    def ray_distance(self, y, x, z):
        """Distance from ``y`` to the ray from ``x`` to ``z``."""
        return self.distance(x, y) - self.point_end_product(y, z, x)

    # -- flow support ------------------------------------------------------

    def line_profiles(self, line, others, s):
        """Distances ``d(line(s), other(s))`` as an array ``(len(others), len(s))``."""
        s = np.asarray(s, dtype=float)
        side1, dep1 = line.trace(s)
        out = np.empty((len(others), s.size))
        for j, g in enumerate(others):
            side2, dep2 = g.trace(s)
            L = np.where(
                side1,
                np.where(side2, lcp(line.plus, g.plus), lcp(line.plus, g.minus)),
                np.where(side2, lcp(line.minus, g.plus), lcp(line.minus, g.minus)),
            ).astype(float)
            out[j] = dep1 + dep2 - 2 * np.minimum(np.minimum(dep1, dep2), L)
        return out

    # -- measure -----------------------------------------------------------

    def branch_length(self, rho):
        """Length within ``rho`` of a vertex inside one branch leaving it."""
        if rho <= 0:
            return 0.0
        q = self.q
        n = floor(rho)
        return (q**n - 1) / (q - 1) + q**n * (rho - n)

    def ball_measure(self, x, T):
        """Exact length of the closed ball ``B(x, T)``."""
        if T <= 0:
            return 0.0
        if x.is_vertex:
            return (self.q + 1) * self.branch_length(T)
        a = float(x.offset)
        b = 1.0 - a
        total = min(T, a) + min(T, b)
        total += self.q * (self.branch_length(T - a) + self.branch_length(T - b))
        return total

    # -- sampling ----------------------------------------------------------

    def _children(self, word):
        top = self.q + 1 if not word else self.q
        return [word + (c,) for c in range(top)]

    def _vertex_distances(self, c, radius):
        """BFS distances from ``c`` to vertices within ``radius + 1``."""
        if c.is_vertex:
            start = {c.word: 0.0}
        else:
            a = float(c.offset)
            start = {c.word: 1.0 - a, c.word[:-1]: a}
        dist = dict(start)
        queue = deque(sorted(start, key=start.get))
        limit = radius + 1 + TOL
        while queue:
            w = queue.popleft()
            d = dist[w]
            if d > radius:
                continue
            nbrs = self._children(w) + ([w[:-1]] if w else [])
            for v in nbrs:
                if v not in dist and d + 1 <= limit:
                    dist[v] = d + 1
                    queue.append(v)
        return dist

    def _edge_dist(self, c, w, dp, dv):
        """Distance function from ``c`` along the edge into ``w``."""
        if not c.is_vertex and c.word == w:
            ac = float(c.offset)
            return lambda a: abs(a - ac), [ac]
        return lambda a: min(dp + a, dv + 1 - a), []

    def sample_region(self, region, mesh=0.5):
        """Mesh-dense finite sample of a ball, sphere or annulus.

        Edge points sit at multiples of ``1 / ceil(1 / mesh)``, plus the
        points where an edge crosses a bounding sphere; spheres are finite
        and sampled exactly.
        """
        if mesh <= 0:
            raise DomainError("mesh must be positive")
        c, lo, hi = region_bounds(region)
        self.check_point(c)
        dist = self._vertex_distances(c, hi)
        m = max(1, ceil(1 / mesh - 1e-12))
        exact_sphere = isinstance(region, Sphere)
        edges = [w for w in dist if w and w[:-1] in dist and min(dist[w], dist[w[:-1]]) <= hi + TOL]
        if not exact_sphere:
            check_cap(len(edges) * m + 1, self.cap)
        pts = set()
        if () in dist and lo - TOL <= dist[()] <= hi + TOL:
            pts.add(ROOT)
        for w in edges:
            dp, dv = dist[w[:-1]], dist[w]
            f, kinks = self._edge_dist(c, w, dp, dv)
            cands = []
            if not exact_sphere:
                cands.extend(Fraction(k, m) for k in range(1, m + 1))
            for level in {lo, hi}:
                for a in (level - dp, dv + 1 - level) + tuple(k + level for k in kinks) + tuple(
                    k - level for k in kinks
                ):
                    if 0 < a <= 1:
                        cands.append(a)
            for a in cands:
                if lo - TOL <= f(float(a)) <= hi + TOL:
                    pts.add(TreePoint(w, _clean(a)))
        check_cap(len(pts), self.cap)
        return TreeSample(self, sorted(pts), center=c, region=region)

    def make_sample(self, points, center=None, region=None):
        center = self.basepoint if center is None else center
        return TreeSample(self, list(points), center=center, region=region)


def _clean(a):
    """Snap floats that are dyadic-exact to fractions, keep others as float."""
    if isinstance(a, Fraction):
        return a
    f = Fraction(a).limit_denominator(1 << 20)
    return f if float(f) == a else a


class TreeSample(Sample):
    """Tree points with a prefix-closed vertex table for fast neighbor search."""

    def __init__(self, space, points, center=None, region=None):
        self.space = space
        self.center = space.basepoint if center is None else center
        self.region = region
        for p in points:
            space.check_point(p)
        words = [p.word for p in points]
        offs = np.array([float(p.offset) for p in points], dtype=float)
        depth = np.array([float(p.depth) for p in points], dtype=float)
        cd = np.array([float(space.distance(self.center, p)) for p in points], dtype=float)
        # vertex table closed under prefixes
        table = {(): 0}
        for w in words:
            for j in range(1, len(w) + 1):
                if w[:j] not in table:
                    table[w[:j]] = len(table)
        vlist = sorted(table)
        rank = {w: i for i, w in enumerate(vlist)}
        wr = np.array([rank[w] for w in words], dtype=np.int64)
        order = greedy_order(cd, [wr, offs])
        self._words = [words[i] for i in order]
        self._pts = [points[i] for i in order]
        self.n = len(points)
        self.offsets = offs[order]
        self.depths = depth[order]
        self.center_distances = cd[order]
        self._rank = wr[order]
        # vertex ids and ancestor matrix
        self._vwords = vlist
        nv = len(vlist)
        dmax = max((len(w) for w in vlist), default=0)
        anc = np.full((nv, max(dmax, 1)), -1, dtype=np.int64)
        parent = np.full(nv, -1, dtype=np.int64)
        children = [[] for _ in range(nv)]
        for w, i in rank.items():
            for j in range(1, len(w) + 1):
                anc[i, j - 1] = rank[w[:j]]
            if w:
                parent[i] = rank[w[:-1]]
                children[parent[i]].append(i)
        self._anc = anc
        self._parent = parent
        self._children = children
        self.vid = self._rank
        by_cell = np.argsort(self.vid, kind="stable")
        self._cell_order = by_cell
        self._cell_start = np.searchsorted(self.vid[by_cell], np.arange(nv + 1))

    def point(self, i):
        return self._pts[i]

    def pair_distances(self, I, J):
        I = np.asarray(I, dtype=np.int64)
        J = np.asarray(J, dtype=np.int64)
        A = self._anc[self.vid[I]]
        B = self._anc[self.vid[J]]
        k = ((A == B) & (A >= 0)).sum(axis=-1)
        di, dj = self.depths[I], self.depths[J]
        return di + dj - 2 * np.minimum(np.minimum(di, dj), k)

    def distances_from(self, i, idx=None):
        idx = np.arange(self.n) if idx is None else np.asarray(idx, dtype=np.int64)
        return self.pair_distances(np.full(idx.shape, i), idx)

    def candidates(self, i, radius):
        hops = floor(radius) + 2
        start = int(self.vid[i])
        seen = {start}
        frontier = [start]
        for _ in range(hops):
            nxt = []
            for v in frontier:
                nb = list(self._children[v])
                if self._parent[v] >= 0:
                    nb.append(int(self._parent[v]))
                for u in nb:
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        cells = np.fromiter(seen, dtype=np.int64)
        st, en = self._cell_start[cells], self._cell_start[cells + 1]
        parts = [self._cell_order[a:b] for a, b in zip(st, en) if b > a]
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(parts))
