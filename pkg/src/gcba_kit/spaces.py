"""Model spaces: spherical metric graphs and Euclidean cones over them.

A *spherical graph* is a finite connected metric multigraph with minimum
degree 2 and girth at least 2*pi; it plays the role of a compact
geodesically complete CAT(1) space of dimension one.  Edges longer than
pi are subdivided at load so that every internal segment carries a
distance function that is a lower envelope of two slope +-1 lines.

A *cone space* is the Euclidean cone over a spherical graph, the
corresponding geodesically complete CAT(0) model.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Optional

import numpy as np

from .errors import ParseError, PreconditionError, SpaceValidationError

PI = math.pi
TWO_PI = 2.0 * math.pi
TAU = 1e-9  # tolerance for piecewise-linear comparisons


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class GraphPoint:
    """Location on a spherical graph: (segment, offset), or a vertex.

    ``vertex`` is set (and ``t`` equals 0 or the segment length) when the
    point sits on an internal vertex; ``seg``/``t`` always give a valid
    incident representation either way.
    """

    seg: int
    t: float
    vertex: Optional[int] = None

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> tuple:
        return (self.seg, self.t)


@dataclass(frozen=True)
class ConePoint:
    """Point of a Euclidean cone: a base point and a radius.

    Radius 0 is the unique apex; its base point is dropped.
    """

    base: Optional[GraphPoint]
    r: float

    @property
    def is_apex(self) -> bool:
        return self.r == 0.0

    def sort_key(self) -> tuple:
        if self.base is None:
            return (-1, 0.0, self.r)
        return (self.base.seg, self.base.t, self.r)


def apex() -> ConePoint:
    return ConePoint(None, 0.0)


def cone_point(base: GraphPoint, r: float) -> ConePoint:
    if r < 0:
        raise ParseError("cone point radius must be nonnegative")
    if r == 0.0:
        return ConePoint(None, 0.0)
    return ConePoint(base, float(r))


# ---------------------------------------------------------------------------
# spherical graphs


class SphericalGraph:
    """Subdivided metric multigraph with cached all-pairs vertex distances."""

    def __init__(self, vertex_ids: list[int], edges: list[tuple[int, int, float]],
                 metric_mode: str = "pi_truncated"):
        if metric_mode not in ("pi_truncated", "intrinsic"):
            raise ParseError(f"unknown metric_mode {metric_mode!r}")
        if not vertex_ids:
            raise ParseError("graph needs at least one vertex")
        if len(set(vertex_ids)) != len(vertex_ids):
            raise ParseError("duplicate vertex ids")
        self.metric_mode = metric_mode
        self.ext_vertex_ids = list(vertex_ids)
        self._vid_index = {v: i for i, v in enumerate(vertex_ids)}
        self.edges_ext: list[tuple[int, int, float]] = []

        seg_u: list[int] = []
        seg_v: list[int] = []
        seg_len: list[float] = []
        seg_edge: list[int] = []
        seg_start: list[float] = []
        self.edge_chains: list[list[int]] = []
        self.vertex_ext: list[Optional[int]] = list(vertex_ids)
        self._sub_vertex_locus: dict[int, tuple[int, float]] = {}

        nv = len(vertex_ids)
        for e_idx, (a, b, length) in enumerate(edges):
            if a not in self._vid_index or b not in self._vid_index:
                raise ParseError(f"edge {e_idx} references unknown vertex")
            if not (length > 0):
                raise ParseError(f"edge {e_idx} has nonpositive length")
            ia, ib = self._vid_index[a], self._vid_index[b]
            self.edges_ext.append((ia, ib, float(length)))
            pieces = max(1, math.ceil(length / PI - 1e-12))
            if ia == ib:
                pieces = max(pieces, 2)
            chain: list[int] = []
            prev = ia
            for k in range(pieces):
                if k + 1 < pieces:
                    nxt = nv
                    self.vertex_ext.append(None)
                    self._sub_vertex_locus[nv] = (e_idx, length * (k + 1) / pieces)
                    nv += 1
                else:
                    nxt = ib
                chain.append(len(seg_u))
                seg_u.append(prev)
                seg_v.append(nxt)
                seg_len.append(length / pieces)
                seg_edge.append(e_idx)
                seg_start.append(length * k / pieces)
                prev = nxt
            self.edge_chains.append(chain)

        self.nv = nv
        self.seg_u = seg_u
        self.seg_v = seg_v
        self.seg_len = seg_len
        self.seg_edge = seg_edge
        self.seg_start = seg_start
        self.n_segments = len(seg_u)
        # adjacency: vertex -> list of (segment, neighbour, end) with end 0
        # when the vertex sits at the segment's u side
        self.adj: list[list[tuple[int, int, int]]] = [[] for _ in range(nv)]
        for s in range(self.n_segments):
            self.adj[seg_u[s]].append((s, seg_v[s], 0))
            self.adj[seg_v[s]].append((s, seg_u[s], 1))
        for lst in self.adj:
            lst.sort()

    # ------------------------------------------------------------- metrics

    @cached_property
    def vertex_distances(self) -> np.ndarray:
        """All-pairs shortest-path distances between internal vertices."""
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import dijkstra

        w = np.full((self.nv, self.nv), np.inf)
        for s in range(self.n_segments):
            u, v, l = self.seg_u[s], self.seg_v[s], self.seg_len[s]
            if l < w[u, v]:
                w[u, v] = w[v, u] = l
        mask = np.isfinite(w)
        rows, cols = np.nonzero(mask)
        mat = csr_matrix((w[rows, cols], (rows, cols)), shape=w.shape)
        return dijkstra(mat, directed=False)

    @property
    def total_length(self) -> float:
        return float(sum(self.seg_len))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def is_cycle_graph(self) -> bool:
        return all(self.degree(v) == 2 for v in range(self.nv))

    # -------------------------------------------------------------- points

    def vertex_point(self, v: int) -> GraphPoint:
        s, other, end = self.adj[v][0]
        t = 0.0 if end == 0 else self.seg_len[s]
        return GraphPoint(s, t, v)

    def seg_point(self, seg: int, t: float) -> GraphPoint:
        l = self.seg_len[seg]
        if t < -1e-12 or t > l + 1e-12:
            raise ParseError(f"offset {t} outside segment of length {l}")
        if t <= 1e-12:
            return self.vertex_point(self.seg_u[seg])
        if t >= l - 1e-12:
            return self.vertex_point(self.seg_v[seg])
        return GraphPoint(seg, float(t))

    def point_on_edge(self, edge: int, offset: float) -> GraphPoint:
        if not (0 <= edge < len(self.edge_chains)):
            raise ParseError(f"unknown edge {edge}")
        a, b, length = self.edges_ext[edge]
        if offset < -1e-12 or offset > length + 1e-12:
            raise ParseError(f"offset {offset} outside edge of length {length}")
        offset = min(max(offset, 0.0), length)
        for s in self.edge_chains[edge]:
            start = self.seg_start[s]
            if offset <= start + self.seg_len[s] + 1e-12:
                return self.seg_point(s, offset - start)
        return self.seg_point(self.edge_chains[edge][-1], self.seg_len[self.edge_chains[edge][-1]])

    def parse_point(self, doc: Any) -> GraphPoint:
        if not isinstance(doc, dict):
            raise ParseError("point must be a JSON object")
        if "vertex" in doc:
            vid = doc["vertex"]
            if vid not in self._vid_index:
                raise ParseError(f"unknown vertex id {vid}")
            return self.vertex_point(self._vid_index[vid])
        if "edge" in doc:
            return self.point_on_edge(int(doc["edge"]), float(doc.get("offset", 0.0)))
        raise ParseError("point needs 'vertex' or 'edge'")

    def external_locus(self, p: GraphPoint) -> dict:
        if p.vertex is not None:
            ext = self.vertex_ext[p.vertex]
            if ext is not None:
                return {"vertex": ext}
            edge, off = self._sub_vertex_locus[p.vertex]
            return {"edge": edge, "offset": off}
        return {"edge": self.seg_edge[p.seg], "offset": self.seg_start[p.seg] + p.t}

    # ---------------------------------------------------------- description

    def to_json(self) -> dict:
        return {
            "type": "graph",
            "vertices": self.ext_vertex_ids,
            "edges": [{"a": self.ext_vertex_ids[a], "b": self.ext_vertex_ids[b], "len": l}
                      for a, b, l in self.edges_ext],
            "metric_mode": self.metric_mode,
        }


# ---------------------------------------------------------------------------
# cones


class ConeSpace:
    """Euclidean cone over a spherical graph."""

    def __init__(self, base: SphericalGraph):
        self.base = base

    @property
    def theta_excess(self) -> Optional[float]:
        """Length excess over 2*pi when the base is a single circle."""
        if self.base.is_cycle_graph():
            return self.base.total_length - TWO_PI
        return None

    def parse_point(self, doc: Any) -> ConePoint:
        if not isinstance(doc, dict):
            raise ParseError("cone point must be a JSON object")
        r = float(doc.get("radius", 0.0))
        if r < 0:
            raise ParseError("radius must be nonnegative")
        if r == 0.0 or doc.get("apex"):
            if doc.get("apex") and r != 0.0:
                raise ParseError("apex point must have radius 0")
            return apex()
        return ConePoint(self.base.parse_point(doc), r)

    def external_locus(self, p: ConePoint) -> dict:
        if p.is_apex:
            return {"apex": True, "radius": 0.0}
        doc = self.base.external_locus(p.base)
        doc["radius"] = p.r
        return doc

    def to_json(self) -> dict:
        return {"type": "cone", "base": self.base.to_json()}


@dataclass(frozen=True)
class TinyBallSpec:
    """Ball in a cone on which comparison geometry is guaranteed to hold."""

    center: ConePoint
    radius: float

    def __post_init__(self):
        if not (0 < self.radius < 1):
            raise PreconditionError("tiny ball radius must lie in (0, 1)")


# ---------------------------------------------------------------------------
# builders


def make_circle(length: float, metric_mode: str = "pi_truncated") -> SphericalGraph:
    """Circle of the given circumference as a single loop edge."""
    if not (length > 0):
        raise ParseError("circle length must be positive")
    return SphericalGraph([0], [(0, 0, float(length))], metric_mode)


def make_suspension(arcs: int, metric_mode: str = "pi_truncated") -> SphericalGraph:
    """Two poles joined by ``arcs`` edges of length pi."""
    if arcs < 1:
        raise ParseError("suspension needs at least one arc")
    return SphericalGraph([0, 1], [(0, 1, PI)] * arcs, metric_mode)


def build_space(description: Any) -> SphericalGraph | ConeSpace:
    """Construct a space from its JSON description without validating it."""
    if isinstance(description, (str, bytes)):
        try:
            description = json.loads(description)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(description, dict) or "type" not in description:
        raise ParseError("space description needs a 'type' field")
    kind = description["type"]
    mode = description.get("metric_mode", "pi_truncated")
    if kind == "circle":
        return make_circle(float(description["length"]), mode)
    if kind == "suspension":
        return make_suspension(int(description["arcs"]), mode)
    if kind == "graph":
        vertices = [int(v) for v in description["vertices"]]
        edges = [(int(e["a"]), int(e["b"]), float(e["len"])) for e in description["edges"]]
        return SphericalGraph(vertices, edges, mode)
    if kind == "cone":
        base = build_space(description["base"])
        if not isinstance(base, SphericalGraph):
            raise ParseError("cone base must be a spherical graph")
        return ConeSpace(base)
    raise ParseError(f"unknown space type {kind!r}")


def make_space(description: Any) -> SphericalGraph | ConeSpace:
    """Construct and validate a space; raises on any failed invariant."""
    space = build_space(description)
    report = validate_space(space)
    if not report.passed:
        raise SpaceValidationError("; ".join(report.failures()))
    return space


# ---------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: Optional[float]
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "margin": self.margin, "detail": self.detail}


@dataclass
class ValidationReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [f"{c.name}: {c.detail}" for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _girth(g: SphericalGraph) -> float:
    """Length of the shortest cycle, computed per removed segment."""
    best = math.inf
    for s in range(g.n_segments):
        u, v, l = g.seg_u[s], g.seg_v[s], g.seg_len[s]
        dist = _dijkstra_without(g, u, v, s)
        if math.isfinite(dist):
            best = min(best, l + dist)
    return best


def _dijkstra_without(g: SphericalGraph, src: int, dst: int, skip_seg: int) -> float:
    dist = [math.inf] * g.nv
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x] + 1e-15:
            continue
        if x == dst:
            return d
        for s, y, _end in g.adj[x]:
            if s == skip_seg:
                continue
            nd = d + g.seg_len[s]
            if nd < dist[y] - 1e-15:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist[dst]


def _connected(g: SphericalGraph) -> bool:
    seen = [False] * g.nv
    stack = [0]
    seen[0] = True
    while stack:
        x = stack.pop()
        for _s, y, _e in g.adj[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    return all(seen)


def validate_graph(g: SphericalGraph) -> ValidationReport:
    checks: list[CheckResult] = []

    ok = _connected(g)
    checks.append(CheckResult("connected", ok, None,
                              "graph is connected" if ok else "graph is disconnected"))

    min_deg = min(g.degree(v) for v in range(g.nv))
    worst = [g.vertex_ext[v] for v in range(g.nv) if g.degree(v) == min_deg]
    checks.append(CheckResult(
        "min_degree", min_deg >= 2, float(min_deg - 2),
        f"minimum degree {min_deg}" + ("" if min_deg >= 2 else f" at vertices {worst}")))

    girth = _girth(g)
    margin = girth - TWO_PI if math.isfinite(girth) else math.inf
    checks.append(CheckResult(
        "girth", margin >= -TAU, margin if math.isfinite(margin) else None,
        f"shortest cycle {girth:.12g} vs 2*pi" if math.isfinite(girth) else "acyclic"))

    max_seg = max(g.seg_len)
    checks.append(CheckResult("segment_length", max_seg <= PI + TAU, PI - max_seg,
                              f"longest segment {max_seg:.12g}"))
    return ValidationReport(checks)


def validate_space(space: SphericalGraph | ConeSpace, quadruples: int = 10_000,
                   seed: int = 20_260_811, four_point_tol: float = 1e-9) -> ValidationReport:
    """Structural checks; for cones additionally a sampled CAT(0)
    four-point comparison on random quadruples."""
    if isinstance(space, SphericalGraph):
        return validate_graph(space)
    report = validate_graph(space.base)
    if report.passed and quadruples > 0:
        from .cones import four_point_check

        worst = four_point_check(space, quadruples, seed)
        report.checks.append(CheckResult(
            "cat0_four_point", worst <= four_point_tol, four_point_tol - worst,
            f"worst quadrilateral-inequality violation {worst:.3e} over {quadruples} quadruples"))
    return report
