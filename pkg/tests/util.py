"""Shared test helpers: plane chart for the cone over a round circle,
random validated graphs, and closed-form oracles."""

from __future__ import annotations

import math
import random

from gcba_kit.spaces import ConePoint, ConeSpace, SphericalGraph, apex, cone_point, make_circle
from gcba_kit.spaces import _girth  # noqa: F401  (oracle cross-checks)

PI = math.pi
TWO_PI = 2.0 * math.pi


def plane_cone() -> ConeSpace:
    return ConeSpace(make_circle(TWO_PI))


def plane_point(K: ConeSpace, x: float, y: float) -> ConePoint:
    r = math.hypot(x, y)
    if r == 0.0:
        return apex()
    w = math.atan2(y, x) % TWO_PI
    return cone_point(K.base.point_on_edge(0, w), r)


def plane_xy(K: ConeSpace, p: ConePoint) -> tuple[float, float]:
    if p.is_apex:
        return 0.0, 0.0
    w = K.base.seg_start[p.base.seg] + p.base.t
    return p.r * math.cos(w), p.r * math.sin(w)


def circle_coordinate(g: SphericalGraph, p) -> float:
    return g.seg_start[p.seg] + p.t


def circle_antipodal_closed_form(L: float, x: float) -> float:
    """Antipodal distance on a circle of length L = 2*pi + theta between
    points at circle distance x."""
    theta = L - TWO_PI
    if x >= theta:
        return PI + theta - x
    return PI


def random_spherical_graph(rng: random.Random, max_extra: int = 4) -> SphericalGraph:
    """Random connected multigraph with min degree 2, rescaled so the
    shortest cycle sits just above 2*pi."""
    nv = rng.randint(3, 6)
    edges = []
    for v in range(1, nv):
        edges.append((rng.randrange(v), v, 0.5 + rng.random()))
    for _ in range(rng.randint(1, max_extra)):
        a = rng.randrange(nv)
        b = rng.randrange(nv)
        if a == b:
            b = (a + 1) % nv
        edges.append((a, b, 0.5 + rng.random()))
    deg = [0] * nv
    for a, b, _l in edges:
        deg[a] += 1
        deg[b] += 1
    while min(deg) < 2:
        v = deg.index(min(deg))
        w = rng.randrange(nv)
        if w == v:
            w = (v + 1) % nv
        edges.append((v, w, 0.5 + rng.random()))
        deg[v] += 1
        deg[w] += 1
    g = SphericalGraph(list(range(nv)), edges)
    girth = _girth(g)
    scale = TWO_PI * (1.02 + rng.random() * 0.5) / girth
    return SphericalGraph(list(range(nv)), [(a, b, l * scale) for a, b, l in edges])


def random_point(g: SphericalGraph, rng: random.Random):
    s = rng.randrange(g.n_segments)
    return g.seg_point(s, rng.random() * g.seg_len[s])
