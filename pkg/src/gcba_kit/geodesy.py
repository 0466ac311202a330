"""Exact metric computations on spherical graphs.

Distances restricted to a segment are lower envelopes of two slope +-1
lines (plus a direct term on the source's own segment), so antipode
sets, antipodal distances, and level sets are solved exactly at
breakpoints.  Sampling never appears in these production paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InternalConsistencyError, PreconditionError
from .plfun import PL
from .spaces import PI, TAU, TWO_PI, GraphPoint, SphericalGraph


# ---------------------------------------------------------------------------
# distance fields


class DistanceData:
    """Distances from one source point to every segment's endpoints."""

    __slots__ = ("g", "source", "A", "B", "own_seg", "t_src")

    def __init__(self, g: SphericalGraph, source: GraphPoint):
        self.g = g
        self.source = source
        D = g.vertex_distances
        su = np.asarray(g.seg_u)
        sv = np.asarray(g.seg_v)
        if source.vertex is not None:
            row = D[source.vertex]
            self.A = row[su]
            self.B = row[sv]
            self.own_seg = -1
            self.t_src = 0.0
        else:
            s0, t0 = source.seg, source.t
            l0 = g.seg_len[s0]
            du = D[g.seg_u[s0]]
            dv = D[g.seg_v[s0]]
            self.A = np.minimum(t0 + du[su], (l0 - t0) + dv[su])
            self.B = np.minimum(t0 + du[sv], (l0 - t0) + dv[sv])
            self.own_seg = s0
            self.t_src = t0

    def eval(self, p: GraphPoint) -> float:
        l = self.g.seg_len[p.seg]
        d = min(self.A[p.seg] + p.t, self.B[p.seg] + l - p.t)
        if p.seg == self.own_seg:
            d = min(d, abs(p.t - self.t_src))
        return float(d)

    def eval_truncated(self, p: GraphPoint) -> float:
        return min(self.eval(p), PI)

    def seg_values(self, seg: int, ts: np.ndarray, truncated: bool = True) -> np.ndarray:
        l = self.g.seg_len[seg]
        d = np.minimum(self.A[seg] + ts, self.B[seg] + l - ts)
        if seg == self.own_seg:
            d = np.minimum(d, np.abs(ts - self.t_src))
        return np.minimum(d, PI) if truncated else d

    # ------------------------------------------------------------ antipodes

    def antipode_intervals(self) -> list[tuple[int, float, float]]:
        """Per-segment closed intervals where the distance is >= pi."""
        g = self.g
        comps: list[tuple[int, float, float]] = []
        for s in range(g.n_segments):
            l = g.seg_len[s]
            lo = max(0.0, float(PI - self.A[s]))
            hi = min(l, float(self.B[s] + l - PI))
            if lo > hi + 1e-12:
                continue
            hi = max(hi, lo)
            if s == self.own_seg:
                # the direct run along the segment must also reach pi
                for a, b in ((lo, min(hi, self.t_src - PI)), (max(lo, self.t_src + PI), hi)):
                    if a <= b + 1e-12:
                        comps.append((s, a, max(a, b)))
            else:
                comps.append((s, lo, hi))
        return comps

    def as_pl(self, truncated: bool = False) -> "GraphPL":
        fields = []
        for s in range(self.g.n_segments):
            l = self.g.seg_len[s]
            f = PL.line(l, self.A[s], self.A[s] + l).minimum(
                PL.line(l, self.B[s] + l, self.B[s]))
            if s == self.own_seg:
                f = f.minimum(PL.vee(l, self.t_src))
            if truncated:
                f = f.clamp_max(PI)
            fields.append(f)
        return GraphPL(self.g, fields)


def distance(g: SphericalGraph, x: GraphPoint, y: GraphPoint,
             truncated: Optional[bool] = None) -> float:
    """Intrinsic shortest-path distance; truncated at pi when requested
    (default follows the graph's metric mode)."""
    if truncated is None:
        truncated = g.metric_mode == "pi_truncated"
    D = g.vertex_distances
    lx, ly = g.seg_len[x.seg], g.seg_len[y.seg]
    ux, vx, uy, vy = g.seg_u[x.seg], g.seg_v[x.seg], g.seg_u[y.seg], g.seg_v[y.seg]
    d = min(
        x.t + D[ux, uy] + y.t,
        x.t + D[ux, vy] + (ly - y.t),
        (lx - x.t) + D[vx, uy] + y.t,
        (lx - x.t) + D[vx, vy] + (ly - y.t),
    )
    if x.seg == y.seg:
        d = min(d, abs(x.t - y.t))
    return min(float(d), PI) if truncated else float(d)


def points_equal(x: GraphPoint, y: GraphPoint, tol: float = 1e-12) -> bool:
    if x.vertex is not None or y.vertex is not None:
        return x.vertex == y.vertex
    return x.seg == y.seg and abs(x.t - y.t) <= tol


# ---------------------------------------------------------------------------
# antipodal distance (both dual formulas, evaluated exactly)


def _sum_candidates(dx: DistanceData, dy: DistanceData) -> tuple[np.ndarray, np.ndarray]:
    g = dx.g
    L = np.asarray(g.seg_len)
    cols = [
        np.zeros_like(L), L,
        (dx.B + L - dx.A) * 0.5, (dy.B + L - dy.A) * 0.5,
        PI - dx.A, dx.B + L - PI, PI - dy.A, dy.B + L - PI,
    ]
    for dd in (dx, dy):
        if dd.own_seg >= 0:
            cols.extend([np.full_like(L, dd.t_src),
                         np.full_like(L, dd.t_src - PI),
                         np.full_like(L, dd.t_src + PI)])
    cand = np.clip(np.stack(cols, axis=1), 0.0, L[:, None])
    return cand, L


def _eval_trunc(dd: DistanceData, cand: np.ndarray, L: np.ndarray) -> np.ndarray:
    vals = np.minimum(dd.A[:, None] + cand, dd.B[:, None] + L[:, None] - cand)
    if dd.own_seg >= 0:
        direct = np.abs(cand[dd.own_seg] - dd.t_src)
        vals[dd.own_seg] = np.minimum(vals[dd.own_seg], direct)
    return np.minimum(vals, PI)


def antipodal_distance(g: SphericalGraph, xi: GraphPoint, eta: GraphPoint,
                       check: bool = True) -> tuple[float, float]:
    """Antipodal distance between xi and eta with the gap between its two
    equivalent formulas: (a) farthest truncated distance from eta over the
    antipode set of xi, (b) sup over the graph of the truncated distance
    sum minus pi.  Requires the pi-truncated metric mode."""
    if g.metric_mode != "pi_truncated":
        raise PreconditionError("antipodal distance needs metric_mode=pi_truncated")
    dx = DistanceData(g, xi)
    dy = DistanceData(g, eta)

    cand, L = _sum_candidates(dx, dy)
    total = _eval_trunc(dx, cand, L) + _eval_trunc(dy, cand, L)
    value_sup = float(total.max()) - PI

    comps = dx.antipode_intervals()
    if not comps:
        raise InternalConsistencyError(
            "empty antipode set in a validated space (geodesic completeness fails)")
    value_ant = -math.inf
    for s, lo, hi in comps:
        pts = [lo, hi,
               (dy.B[s] + g.seg_len[s] - dy.A[s]) * 0.5,
               PI - dy.A[s], dy.B[s] + g.seg_len[s] - PI]
        if dy.own_seg == s:
            pts.extend([dy.t_src, dy.t_src - PI, dy.t_src + PI])
        ts = np.clip(np.asarray(pts), lo, hi)
        value_ant = max(value_ant, float(dy.seg_values(s, ts).max()))

    gap = abs(value_sup - value_ant)
    if check:
        lower = PI - min(distance(g, xi, eta, truncated=True), PI)
        if value_sup > PI + 1e-9 or value_sup < lower - 1e-9:
            raise InternalConsistencyError(
                f"antipodal distance {value_sup} outside [{lower}, pi]")
        if gap > 1e-6:
            raise InternalConsistencyError(
                f"antipodal distance formulas disagree by {gap}")
    return value_sup, gap


# ---------------------------------------------------------------------------
# antipode sets


@dataclass
class AntipodeSet:
    """Solution set of d(source, .) >= pi: closed subsegments and points."""

    g: SphericalGraph
    source: GraphPoint
    components: list[tuple[int, float, float]]

    def __post_init__(self):
        if not self.components:
            raise InternalConsistencyError(
                "empty antipode set in a validated space")

    def contains(self, p: GraphPoint, tol: float = 1e-9) -> bool:
        for s, lo, hi in self.components:
            if p.seg == s and lo - tol <= p.t <= hi + tol:
                return True
            # vertex points match any incident component endpoint
            if p.vertex is not None:
                for end_t, vtx in ((0.0, self.g.seg_u[s]), (self.g.seg_len[s], self.g.seg_v[s])):
                    if vtx == p.vertex and lo - tol <= end_t <= hi + tol:
                        return True
        return False

    def sample_points(self) -> list[GraphPoint]:
        """Representative points: both endpoints and midpoint per component."""
        pts = []
        for s, lo, hi in self.components:
            for t in {lo, 0.5 * (lo + hi), hi}:
                pts.append(self.g.seg_point(s, t))
        return pts

    def to_json(self) -> dict:
        g = self.g
        segments = []
        points = []
        for s, lo, hi in sorted(self.components):
            if hi - lo <= 1e-12:
                points.append(g.external_locus(g.seg_point(s, lo)))
            else:
                base = g.seg_start[s]
                segments.append({"edge": g.seg_edge[s], "from": base + lo, "to": base + hi})
        # merge touching intervals on the same original edge
        merged: list[dict] = []
        for seg in segments:
            if merged and merged[-1]["edge"] == seg["edge"] and seg["from"] - merged[-1]["to"] <= 1e-12:
                merged[-1]["to"] = seg["to"]
            else:
                merged.append(dict(seg))
        dedup_points = []
        for p in points:
            if not any(p == q for q in dedup_points):
                dedup_points.append(p)
        return {"segments": merged, "points": dedup_points}


def antipode_set(g: SphericalGraph, xi: GraphPoint) -> AntipodeSet:
    comps = DistanceData(g, xi).antipode_intervals()
    # drop duplicate degenerate components sitting on vertices already
    # covered by an adjacent segment's interval
    return AntipodeSet(g, xi, comps)


# ---------------------------------------------------------------------------
# graph-level piecewise-linear fields


class GraphPL:
    """One PL function per segment of a spherical graph."""

    __slots__ = ("g", "fields")

    def __init__(self, g: SphericalGraph, fields: list[PL]):
        self.g = g
        self.fields = fields

    def _zip(self, other: "GraphPL", op) -> "GraphPL":
        return GraphPL(self.g, [op(a, b) for a, b in zip(self.fields, other.fields)])

    def minimum(self, other: "GraphPL") -> "GraphPL":
        return self._zip(other, PL.minimum)

    def maximum(self, other: "GraphPL") -> "GraphPL":
        return self._zip(other, PL.maximum)

    def __add__(self, other: "GraphPL") -> "GraphPL":
        return self._zip(other, PL.__add__)

    def shift(self, c: float) -> "GraphPL":
        return GraphPL(self.g, [f.shift(c) for f in self.fields])

    def scale(self, c: float) -> "GraphPL":
        return GraphPL(self.g, [f.scale(c) for f in self.fields])

    def clamp_max(self, c: float) -> "GraphPL":
        return GraphPL(self.g, [f.clamp_max(c) for f in self.fields])

    def __neg__(self) -> "GraphPL":
        return GraphPL(self.g, [-f for f in self.fields])

    def evaluate(self, p: GraphPoint) -> float:
        return self.fields[p.seg](p.t)

    def global_max(self) -> tuple[GraphPoint, float]:
        best = None
        for s, f in enumerate(self.fields):
            x, v = f.max()
            p = self.g.seg_point(s, x)
            key = (-v, p.sort_key())
            if best is None or key < (best[0], best[1]):
                best = (key[0], key[1], p)
        return best[2], -best[0]

    def global_min(self) -> tuple[GraphPoint, float]:
        best = None
        for s, f in enumerate(self.fields):
            x, v = f.min()
            p = self.g.seg_point(s, x)
            key = (v, p.sort_key())
            if best is None or key < (best[0], best[1]):
                best = (key[0], key[1], p)
        return best[2], best[0]

    def solve_eq(self, c: float, tol: float = TAU) -> list[GraphPoint]:
        pts: list[GraphPoint] = []
        for s, f in enumerate(self.fields):
            for x in f.solve_eq(c, tol):
                pts.append(self.g.seg_point(s, x))
        out: list[GraphPoint] = []
        for p in sorted(pts, key=GraphPoint.sort_key):
            if not any(points_equal(p, q, 1e-10) for q in out):
                out.append(p)
        return out

    def solve_ge(self, c: float) -> list[tuple[int, float, float]]:
        comps = []
        for s, f in enumerate(self.fields):
            for lo, hi in f.solve_ge(c):
                comps.append((s, lo, hi))
        return comps

    def breakpoints(self) -> list[GraphPoint]:
        pts = []
        for s, f in enumerate(self.fields):
            for x in f.xs:
                pts.append(self.g.seg_point(s, x))
        out: list[GraphPoint] = []
        for p in sorted(pts, key=GraphPoint.sort_key):
            if not any(points_equal(p, q, 1e-11) for q in out):
                out.append(p)
        return out


def _vertex_field(g: SphericalGraph, v: int) -> GraphPL:
    cache = getattr(g, "_vertex_field_cache", None)
    if cache is None:
        cache = {}
        g._vertex_field_cache = cache
    if v not in cache:
        D = g.vertex_distances
        fields = []
        for s in range(g.n_segments):
            l = g.seg_len[s]
            fields.append(PL.line(l, D[v, g.seg_u[s]], D[v, g.seg_u[s]] + l).minimum(
                PL.line(l, D[v, g.seg_v[s]] + l, D[v, g.seg_v[s]])))
        cache[v] = GraphPL(g, fields)
    return cache[v]


def point_field(g: SphericalGraph, p: GraphPoint, truncated: bool = False) -> GraphPL:
    """d(p, .) as an exact per-segment PL field."""
    return DistanceData(g, p).as_pl(truncated)


def antipodal_field(g: SphericalGraph, xi: GraphPoint) -> GraphPL:
    """eta -> antipodal distance from xi, as an exact PL field.

    Uses the antipode formulation: the farthest point of each antipode
    component, maximized over components.  For a component [c, d] on a
    segment (u, v, l) and eta off that segment, the farthest distance is
    min(d(u,eta)+d, d(v,eta)+l-c, (d(u,eta)+d(v,eta)+l)/2); on the
    segment itself every non-direct route is at least pi long, so the
    truncated farthest distance is min(max(|t-c|, |t-d|), pi).
    """
    if g.metric_mode != "pi_truncated":
        raise PreconditionError("antipodal field needs metric_mode=pi_truncated")
    comps = DistanceData(g, xi).antipode_intervals()
    if not comps:
        raise InternalConsistencyError("empty antipode set in a validated space")
    acc: GraphPL | None = None
    for s, lo, hi in comps:
        u, v, l = g.seg_u[s], g.seg_v[s], g.seg_len[s]
        fu = _vertex_field(g, u)
        fv = _vertex_field(g, v)
        comp = fu.shift(hi).minimum(fv.shift(l - lo)).minimum((fu + fv).shift(l).scale(0.5))
        own = PL.vee(l, lo).maximum(PL.vee(l, hi)).clamp_max(PI)
        comp.fields[s] = own
        acc = comp if acc is None else acc.maximum(comp)
    return acc.clamp_max(PI)


# ---------------------------------------------------------------------------
# geodesics


@dataclass
class GeodesicPath:
    """Locally shortest path stored as directed segment traversals."""

    g: SphericalGraph
    start: GraphPoint
    end: GraphPoint
    steps: list[tuple[int, float, float]]  # (segment, offset from, offset to)

    @property
    def length(self) -> float:
        return float(sum(abs(b - a) for _s, a, b in self.steps))

    def point_at(self, dist: float) -> GraphPoint:
        if dist <= 0:
            return self.start
        acc = 0.0
        for s, a, b in self.steps:
            piece = abs(b - a)
            if dist <= acc + piece + 1e-12:
                frac = (dist - acc) / piece if piece > 0 else 0.0
                frac = min(max(frac, 0.0), 1.0)
                return self.g.seg_point(s, a + (b - a) * frac)
            acc += piece
        return self.end

    def initial_direction(self) -> Optional["DirToken"]:
        if not self.steps:
            return None
        s, a, b = self.steps[0]
        return DirToken(s, 1 if b > a else -1)

    def final_direction(self) -> Optional["DirToken"]:
        if not self.steps:
            return None
        s, a, b = self.steps[-1]
        return DirToken(s, 1 if b > a else -1)

    def loci(self) -> list[dict]:
        out = [self.g.external_locus(self.start)]
        for s, a, b in self.steps:
            out.append({"edge": self.g.seg_edge[s],
                        "from": self.g.seg_start[s] + a,
                        "to": self.g.seg_start[s] + b})
        out.append(self.g.external_locus(self.end))
        return out

    def to_json(self) -> dict:
        return {"length": self.length, "loci": self.loci()}


@dataclass(frozen=True, order=True)
class DirToken:
    """Direction at a graph point: a segment and an orientation sign."""

    seg: int
    sign: int


def direction_tokens_at(g: SphericalGraph, x: GraphPoint) -> list[DirToken]:
    if x.vertex is None:
        return [DirToken(x.seg, -1), DirToken(x.seg, 1)]
    toks = []
    for s, _other, end in g.adj[x.vertex]:
        toks.append(DirToken(s, 1 if end == 0 else -1))
    return sorted(set(toks))


_MAX_STEPS = 512


def geodesics(g: SphericalGraph, x: GraphPoint, y: GraphPoint,
              max_len: float) -> list[GeodesicPath]:
    """All locally shortest (non-backtracking) paths from x to y of length
    at most ``max_len`` (which must not exceed 2*pi)."""
    if max_len > TWO_PI + 1e-9:
        raise PreconditionError("geodesic enumeration capped at length 2*pi")
    tol = 1e-12
    results: list[GeodesicPath] = []

    if points_equal(x, y):
        results.append(GeodesicPath(g, x, y, []))

    def arrive(steps: list[tuple[int, float, float]]):
        results.append(GeodesicPath(g, x, y, list(steps)))

    def expand(v: int, in_seg: Optional[int], acc: float, steps: list):
        if y.vertex is not None and v == y.vertex and acc > tol:
            arrive(steps)
        if len(steps) >= _MAX_STEPS:
            raise InternalConsistencyError("geodesic search exceeded step cap")
        for s, w, end in g.adj[v]:
            if s == in_seg:
                continue
            l = g.seg_len[s]
            t_from = 0.0 if end == 0 else l
            t_to = l if end == 0 else 0.0
            if y.vertex is None and y.seg == s:
                part = abs(y.t - t_from)
                if part > tol and acc + part <= max_len + 1e-12:
                    arrive(steps + [(s, t_from, y.t)])
            if acc + l <= max_len + 1e-12:
                steps.append((s, t_from, t_to))
                expand(w, s, acc + l, steps)
                steps.pop()

    if x.vertex is not None:
        expand(x.vertex, None, 0.0, [])
    else:
        s0, t0 = x.seg, x.t
        l0 = g.seg_len[s0]
        if y.vertex is None and y.seg == s0 and abs(y.t - t0) > tol:
            if abs(y.t - t0) <= max_len + 1e-12:
                arrive([(s0, t0, y.t)])
        for target_t, vtx in ((0.0, g.seg_u[s0]), (l0, g.seg_v[s0])):
            run = abs(target_t - t0)
            if run > tol and run <= max_len + 1e-12:
                steps = [(s0, t0, target_t)]
                expand(vtx, s0, run, steps)
            elif run <= tol:
                # source sits numerically on a vertex but was not normalized
                expand(vtx, None, 0.0, [])

    results.sort(key=lambda p: (p.length, p.steps))
    return results


def extend_path(g: SphericalGraph, path: GeodesicPath, extra_len: float) -> GeodesicPath:
    """One geodesic extension past the endpoint; branch choices resolved
    by lowest (edge id, segment id)."""
    steps = list(path.steps)
    remaining = extra_len
    if steps:
        s, a, b = steps[-1]
        l = g.seg_len[s]
        if b > a and b < l - 1e-12:
            run = min(remaining, l - b)
            steps[-1] = (s, a, b + run)
            remaining -= run
        elif b < a and b > 1e-12:
            run = min(remaining, b)
            steps[-1] = (s, a, b - run)
            remaining -= run
        cur_end = steps[-1]
    else:
        if path.end.vertex is None:
            raise PreconditionError("cannot extend an empty interior path")
    while remaining > 1e-12:
        s, a, b = steps[-1] if steps else (None, None, None)
        if steps:
            endpoint = g.seg_v[s] if b > a else g.seg_u[s]
            in_seg = s
        else:
            endpoint = path.end.vertex
            in_seg = None
        choices = [(g.seg_edge[s2], s2, w, e2) for s2, w, e2 in g.adj[endpoint] if s2 != in_seg]
        if not choices:
            raise InternalConsistencyError("dead-end vertex in a validated space")
        _edge, s2, _w, end2 = min(choices)
        l2 = g.seg_len[s2]
        t_from = 0.0 if end2 == 0 else l2
        run = min(remaining, l2)
        t_to = t_from + run if end2 == 0 else t_from - run
        steps.append((s2, t_from, t_to))
        remaining -= run
    last_s, _a, last_b = steps[-1]
    return GeodesicPath(g, path.start, g.seg_point(last_s, last_b), steps)


def one_shortest_path(g: SphericalGraph, x: GraphPoint, y: GraphPoint) -> GeodesicPath:
    """The shortest path between points at intrinsic distance below pi,
    reconstructed greedily from the vertex distance matrix.

    In a validated graph such a path is unique (a tie would close a
    cycle shorter than 2*pi), so any ambiguity raises.
    """
    if points_equal(x, y):
        return GeodesicPath(g, x, y, [])
    D = g.vertex_distances
    sx, tx, sy, ty = x.seg, x.t, y.seg, y.t
    lx, ly = g.seg_len[sx], g.seg_len[sy]

    if x.vertex is not None:
        exits = [(0.0, x.vertex, None)]
    else:
        exits = [(tx, g.seg_u[sx], (sx, tx, 0.0)), (lx - tx, g.seg_v[sx], (sx, tx, lx))]
    if y.vertex is not None:
        entries = [(0.0, y.vertex, None)]
    else:
        entries = [(ty, g.seg_u[sy], (sy, 0.0, ty)), (ly - ty, g.seg_v[sy], (sy, ly, ty))]

    best = None
    tie = False
    direct = None
    if x.vertex is None and y.vertex is None and sx == sy:
        direct = abs(tx - ty)
    for cx, ex, head in exits:
        for cy, ey, tail in entries:
            val = cx + float(D[ex, ey]) + cy
            if best is None or val < best[0] - 1e-12:
                best = (val, ex, ey, head, tail)
                tie = False
            elif val < best[0] + 1e-12 and (ex, ey) != (best[1], best[2]):
                tie = True
    if direct is not None and direct <= best[0] + 1e-12:
        if direct < best[0] - 1e-12:
            return GeodesicPath(g, x, y, [(sx, tx, ty)])
        tie = True
    if best[0] >= PI:
        raise PreconditionError("direct reconstruction is only valid below pi")
    if tie:
        raise InternalConsistencyError(
            "non-unique sub-pi shortest path; girth invariant violated")

    _val, ex, ey, head, tail = best
    steps: list[tuple[int, float, float]] = []
    if head is not None and abs(head[1] - head[2]) > 1e-15:
        steps.append(head)
    cur = ex
    while cur != ey:
        options = []
        for s, w, end in g.adj[cur]:
            if abs(g.seg_len[s] + float(D[w, ey]) - float(D[cur, ey])) <= 1e-12:
                options.append((g.seg_edge[s], s, w, end))
        if not options:
            raise InternalConsistencyError("distance matrix inconsistent with adjacency")
        options.sort()
        if len(options) > 1 and options[0][2] != options[1][2]:
            raise InternalConsistencyError(
                "non-unique sub-pi shortest path; girth invariant violated")
        _e, s, w, end = options[0]
        l = g.seg_len[s]
        steps.append((s, 0.0, l) if end == 0 else (s, l, 0.0))
        cur = w
    if tail is not None and abs(tail[1] - tail[2]) > 1e-15:
        steps.append(tail)
    return GeodesicPath(g, x, y, steps)


def shortest_paths(g: SphericalGraph, x: GraphPoint, y: GraphPoint) -> list[GeodesicPath]:
    d = distance(g, x, y, truncated=False)
    if d > TWO_PI:
        raise PreconditionError("shortest-path enumeration capped at length 2*pi")
    paths = geodesics(g, x, y, d + 1e-11)
    return [p for p in paths if p.length <= d + 1e-9]


def direction_of(g: SphericalGraph, x: GraphPoint, target: GraphPoint) -> list[DirToken]:
    """Initial directions of every shortest path from x to the target."""
    if points_equal(x, target):
        raise PreconditionError("direction undefined toward the point itself")
    toks = []
    for p in shortest_paths(g, x, target):
        tok = p.initial_direction()
        if tok is not None and tok not in toks:
            toks.append(tok)
    if not toks:
        raise InternalConsistencyError("no shortest path found")
    return sorted(toks)


# ---------------------------------------------------------------------------
# zero-dimensional direction spaces


@dataclass(frozen=True)
class DiscretePiSet:
    """Finite set with pairwise distance pi (a 0-dimensional model)."""

    points: tuple

    def __post_init__(self):
        if len(self.points) < 2:
            raise PreconditionError("a discrete direction space needs >= 2 points")

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def distance(self, a, b) -> float:
        self._check(a), self._check(b)
        return 0.0 if a == b else PI

    def _check(self, a):
        if a not in self.points:
            raise PreconditionError(f"{a!r} is not a point of the discrete set")

    def antipodal_distance(self, a, b) -> tuple[float, float]:
        self._check(a), self._check(b)
        if a == b:
            return PI, 0.0
        return (0.0, 0.0) if len(self.points) == 2 else (PI, 0.0)

    def antipodes(self, a) -> list:
        self._check(a)
        return [p for p in self.points if p != a]

    def to_json(self) -> dict:
        return {"type": "discrete_pi", "cardinality": len(self.points),
                "points": [str(p) for p in self.points]}


def direction_space_graph(g: SphericalGraph, x: GraphPoint) -> DiscretePiSet:
    return DiscretePiSet(tuple(direction_tokens_at(g, x)))
