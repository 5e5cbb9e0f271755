"""Finite metric graphs with positive edge weights.

The bicombing follows the lexicographically minimal shortest path, which
is deterministic but not convex in general, so graphs are flagged as an
approximate model.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..errors import (
    DegenerateSegmentError,
    DomainError,
    GeometryError,
    ModelMismatchError,
    UnsupportedBoundaryError,
)
from .base import DEFAULT_CAP, TOL, Sample, check_cap, greedy_order, region_bounds


@dataclass(frozen=True, order=True)
class GraphPoint:
    """Point at distance ``offset`` from the first endpoint of ``edge``."""

    edge: int
    offset: float


def parse_edge_list(text):
    """Parse ``"u v w"`` lines (``#`` starts a comment line) into edge triples."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"line {lineno}: expected 'u v w'")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
        if u < 0 or v < 0:
            raise DomainError(f"line {lineno}: vertex ids must be nonnegative")
        edges.append((u, v, w))
    return edges


class MetricGraph:
    """Connected metric graph given by ``(u, v, w)`` edge triples."""

    kind = "graph"
    approximate = True

    def __init__(self, edges, basepoint_vertex=None, packing_params=None, delta_hint=None,
                 cap=DEFAULT_CAP):
        edges = [(int(u), int(v), float(w)) for u, v, w in edges]
        if not edges:
            raise DomainError("a metric graph needs at least one edge")
        for u, v, w in edges:
            if not (w > 0 and np.isfinite(w)):
                raise DomainError("edge weights must be positive and finite")
            if u == v:
                raise DomainError("loops are not supported")
        self.edges = tuple(edges)
        self.vertices = tuple(sorted({u for u, _, _ in edges} | {v for _, v, _ in edges}))
        self._vidx = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        W = np.full((n, n), np.inf)
        for u, v, w in edges:
            i, j = self._vidx[u], self._vidx[v]
            W[i, j] = W[j, i] = min(W[i, j], w)
        rows, cols = np.nonzero(np.isfinite(W))
        M = csr_matrix((W[rows, cols], (rows, cols)), shape=(n, n))
        if connected_components(M, directed=False)[0] != 1:
            raise DomainError("the graph must be connected")
        self.D = shortest_path(M, directed=False)
        self.incident = {v: sorted(e for e, (a, b, _) in enumerate(edges) if v in (a, b))
                         for v in self.vertices}
        self.packing_params = packing_params
        self.delta_hint = delta_hint
        self.cap = int(cap)
        b = self.vertices[0] if basepoint_vertex is None else basepoint_vertex
        self.basepoint = self.vertex_point(b)

    @classmethod
    def from_text(cls, text, **kw):
        return cls(parse_edge_list(text), **kw)

    def __repr__(self):
        return f"MetricGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    # -- points ------------------------------------------------------------

    def vertex_point(self, v):
        e = self.incident[v][0]
        a, _, w = self.edges[e]
        return GraphPoint(e, 0.0 if a == v else w)

    def point(self, edge, offset):
        return self.check_point(GraphPoint(int(edge), float(offset)))

    def check_point(self, x):
        if not isinstance(x, GraphPoint):
            raise ModelMismatchError(f"{x!r} is not a graph point")
        if not 0 <= x.edge < len(self.edges):
            raise DomainError("unknown edge id")
        u, v, w = self.edges[x.edge]
        if not 0 <= x.offset <= w:
            raise DomainError("offset outside the edge")
        if x.offset == 0:
            return self.vertex_point(u)
        if x.offset == w:
            return self.vertex_point(v)
        return x

    def _ends(self, x):
        """``[(vertex, distance from x)]`` for the endpoints of x's edge."""
        u, v, w = self.edges[x.edge]
        return [(u, x.offset), (v, w - x.offset)]

    def distance(self, x, y):
        x, y = self.check_point(x), self.check_point(y)
        best = np.inf
        if x.edge == y.edge:
            best = abs(x.offset - y.offset)
        for a, da in self._ends(x):
            for b, db in self._ends(y):
                best = min(best, da + self.D[self._vidx[a], self._vidx[b]] + db)
        return float(best)

    def gromov_product(self, x, y, z):
        return (self.distance(x, y) + self.distance(x, z) - self.distance(y, z)) / 2

    # -- paths -------------------------------------------------------------

    def _vertex_path(self, a, b):
        path = [a]
        while path[-1] != b:
            cur = path[-1]
            target = self.D[self._vidx[cur], self._vidx[b]]
            best = None
            for e in self.incident[cur]:
                u, v, w = self.edges[e]
                nxt = v if u == cur else u
                if abs(w + self.D[self._vidx[nxt], self._vidx[b]] - target) <= 1e-12 * max(1, target):
                    if best is None or nxt < best[0] or (nxt == best[0] and w < best[1]):
                        best = (nxt, w, e)
            path.append(best[0])
        return path

    def _edge_between(self, a, b):
        cands = [e for e in self.incident[a] if b in self.edges[e][:2]]
        return min(cands, key=lambda e: (self.edges[e][2], e))

    def _segments(self, x, y):
        """Segments ``(edge, a_from, a_to)`` of the bicombing path from x to y."""
        routes = []
        if x.edge == y.edge:
            routes.append((abs(x.offset - y.offset), (), [(x.edge, x.offset, y.offset)]))
        for a, da in self._ends(x):
            for b, db in self._ends(y):
                L = da + self.D[self._vidx[a], self._vidx[b]] + db
                vp = self._vertex_path(a, b)
                segs = []
                if da > 0:
                    segs.append((x.edge, x.offset, 0.0 if self.edges[x.edge][0] == a else self.edges[x.edge][2]))
                for p, q in zip(vp, vp[1:]):
                    e = self._edge_between(p, q)
                    u, _, w = self.edges[e]
                    segs.append((e, 0.0, w) if u == p else (e, w, 0.0))
                if db > 0:
                    segs.append((y.edge, 0.0 if self.edges[y.edge][0] == b else self.edges[y.edge][2], y.offset))
                routes.append((L, tuple(vp), segs))
        L = min(r[0] for r in routes)
        best = min((r for r in routes if r[0] <= L + 1e-12 * max(1, L)), key=lambda r: r[1])
        return best[2]

    @staticmethod
    def _walk(segs, s):
        for e, a0, a1 in segs:
            ln = abs(a1 - a0)
            if s <= ln + 1e-15:
                return e, a0 + (s if a1 >= a0 else -s)
            s -= ln
        e, _, a1 = segs[-1]
        return e, a1

    def bicombing(self, x, y, t):
        if not 0 <= t <= 1:
            raise DomainError("t must lie in [0, 1]")
        x, y = self.check_point(x), self.check_point(y)
        if t == 0 or x == y:
            return x
        if t == 1:
            return y
        segs = self._segments(x, y)
        e, a = self._walk(segs, t * self.distance(x, y))
        return self.check_point(GraphPoint(e, min(max(a, 0.0), self.edges[e][2])))

    def extend_to_line(self, x, y):
        x, y = self.check_point(x), self.check_point(y)
        if x == y:
            raise DegenerateSegmentError("cannot extend a degenerate segment")
        fwd = self._segments(x, y)
        back = self._segments(y, x)
        return GraphLine(self, tuple(fwd), tuple(back))

    def line_from_boundary_pair(self, zminus, zplus):
        raise UnsupportedBoundaryError("metric graphs carry no boundary support")

    def next_segment(self, seg):
        """Non-backtracking continuation after ``seg`` by minimal edge id."""
        e, a0, a1 = seg
        u, v, w = self.edges[e]
        if 0 < a1 < w:
            return (e, a1, w if a1 > a0 else 0.0)
        vert = v if a1 == w else u
        options = [f for f in self.incident[vert] if f != e]
        if not options:
            raise GeometryError(f"vertex {vert} is a dead end; the line cannot be extended")
        f = options[0]
        fu, _, fw = self.edges[f]
        return (f, 0.0, fw) if fu == vert else (f, fw, 0.0)

    def line_profiles(self, line, others, s):
        P = [line.eval(t) for t in s]
        return np.array([[self.distance(p, g.eval(t)) for p, t in zip(P, s)] for g in others])

    def ball_measure(self, x, T):
        """Exact length of ``B(x, T)`` as a union of intervals per edge."""
        if T <= 0:
            return 0.0
        x = self.check_point(x)
        total = 0.0
        for e, (u, v, w) in enumerate(self.edges):
            du = self.distance(x, self.vertex_point(u))
            dv = self.distance(x, self.vertex_point(v))
            iv = [(0.0, T - du), (w + dv - T, w)]
            if e == x.edge:
                iv.append((x.offset - T, x.offset + T))
            iv = sorted((max(a, 0.0), min(b, w)) for a, b in iv if min(b, w) > max(a, 0.0))
            end = 0.0
            for a, b in iv:
                total += max(0.0, b - max(a, end))
                end = max(end, b)
        return total

    # -- sampling ----------------------------------------------------------

    def _edge_distance(self, c, e, a):
        u, v, w = self.edges[e]
        du = self.distance(c, self.vertex_point(u))
        dv = self.distance(c, self.vertex_point(v))
        d = np.minimum(du + a, dv + w - a)
        if e == c.edge:
            d = np.minimum(d, np.abs(a - c.offset))
        return d

    def sample_region(self, region, mesh=0.5):
        if mesh <= 0:
            raise DomainError("mesh must be positive")
        c, lo, hi = region_bounds(region)
        c = self.check_point(c)
        pts = []
        for e, (u, v, w) in enumerate(self.edges):
            m = max(1, ceil(w / mesh - 1e-12))
            check_cap(len(pts) + m + 1, self.cap)
            du = self.distance(c, self.vertex_point(u))
            dv = self.distance(c, self.vertex_point(v))
            grid = list(w * np.arange(m + 1) / m)
            for level in {lo, hi}:
                grid += [level - du, w + dv - level]
                if e == c.edge:
                    grid += [c.offset - level, c.offset + level]
            a = np.array(sorted(set(g for g in grid if 0 <= g <= w)))
            d = self._edge_distance(c, e, a)
            for ai in a[(d >= lo - TOL) & (d <= hi + TOL)]:
                pts.append(self.check_point(GraphPoint(e, float(ai))))
        return GraphSample(self, sorted(set(pts)), center=c, region=region)

    def make_sample(self, points, center=None, region=None):
        return GraphSample(self, [self.check_point(p) for p in points], center=center, region=region)


class GraphLine:
    """Bi-infinite non-backtracking walk extending a bicombing segment."""

    def __init__(self, space, forward, backward):
        self.space = space
        self._fwd = list(forward)
        self._back = list(backward)
        self._seed = sum(abs(b - a) for _, a, b in backward)

    def _extend(self, segs, s):
        total = sum(abs(b - a) for _, a, b in segs)
        while total < s:
            nxt = self.space.next_segment(segs[-1])
            segs.append(nxt)
            total += abs(nxt[2] - nxt[1])

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        t = float(t)
        if t >= 0:
            segs, s = self._fwd, t
        else:
            # the backward walk runs from the far endpoint through time 0
            segs, s = self._back, self._seed - t
        self._extend(segs, s)
        e, a = self.space._walk(segs, s)
        w = self.space.edges[e][2]
        return self.space.check_point(GraphPoint(e, min(max(a, 0.0), w)))


class GraphSample(Sample):
    def __init__(self, space, points, center=None, region=None):
        self.space = space
        self.center = space.basepoint if center is None else center
        self.region = region
        cd = np.array([space.distance(self.center, p) for p in points], dtype=float)
        edges = np.array([p.edge for p in points], dtype=np.int64)
        offs = np.array([p.offset for p in points], dtype=float)
        order = greedy_order(cd, [edges, offs])
        self._pts = [points[i] for i in order]
        self.edge = edges[order]
        self.offset = offs[order]
        self.center_distances = cd[order]
        self.n = len(points)
        E = space.edges
        vi = space._vidx
        self._u = np.array([vi[E[e][0]] for e in self.edge], dtype=np.int64)
        self._v = np.array([vi[E[e][1]] for e in self.edge], dtype=np.int64)
        self._w = np.array([E[e][2] for e in self.edge], dtype=float)

    def point(self, i):
        return self._pts[i]

    def pair_distances(self, I, J):
        I = np.asarray(I, dtype=np.int64)
        J = np.asarray(J, dtype=np.int64)
        D = self.space.D
        ui, vi, ai, wi = self._u[I], self._v[I], self.offset[I], self._w[I]
        uj, vj, aj, wj = self._u[J], self._v[J], self.offset[J], self._w[J]
        d = np.minimum.reduce([
            ai + D[ui, uj] + aj,
            ai + D[ui, vj] + (wj - aj),
            (wi - ai) + D[vi, uj] + aj,
            (wi - ai) + D[vi, vj] + (wj - aj),
        ])
        same = self.edge[I] == self.edge[J]
        return np.where(same, np.minimum(d, np.abs(aj - ai)), d)

    def distances_from(self, i, idx=None):
        idx = np.arange(self.n) if idx is None else np.asarray(idx, dtype=np.int64)
        return self.pair_distances(np.full(idx.shape, i), idx)
