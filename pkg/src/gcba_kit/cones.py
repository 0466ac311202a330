"""Euclidean cones over spherical graphs: metric, geodesics, directions.

The cone metric is the standard one: with base separation capped at pi,
d((x,s),(y,t))^2 = s^2 + t^2 - 2 s t cos(min(d(x,y), pi)).  Geodesics
between points with base separation below pi develop isometrically onto
a planar chord; otherwise they run through the apex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionError
from . import geodesy
from .geodesy import DirToken, DiscretePiSet, GeodesicPath
from .spaces import PI, ConePoint, ConeSpace, GraphPoint, SphericalGraph, apex


def _clamp(x: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return lo if x < lo else hi if x > hi else x


def base_separation(K: ConeSpace, x: GraphPoint, y: GraphPoint) -> float:
    """Intrinsic base distance capped at pi (the cone never sees more)."""
    return min(geodesy.distance(K.base, x, y, truncated=False), PI)


def cone_distance(K: ConeSpace, u: ConePoint, v: ConePoint) -> float:
    if u.is_apex:
        return v.r
    if v.is_apex:
        return u.r
    l = base_separation(K, u.base, v.base)
    s, t = u.r, v.r
    return math.sqrt(max(s * s + t * t - 2.0 * s * t * math.cos(l), 0.0))


def cone_points_equal(u: ConePoint, v: ConePoint, tol: float = 1e-12) -> bool:
    if u.is_apex or v.is_apex:
        return u.is_apex and v.is_apex
    return abs(u.r - v.r) <= tol and geodesy.points_equal(u.base, v.base)


@dataclass
class ConeGeodesic:
    """Unit-speed shortest path in a cone.

    ``kind`` is one of 'trivial', 'radial' (same base ray, includes apex
    endpoints), 'apex' (base separation >= pi, runs through the apex), or
    'developed' (unfolds onto a planar chord over the base geodesic).
    """

    K: ConeSpace
    u: ConePoint
    v: ConePoint
    kind: str
    length: float
    ell: float = 0.0
    base_path: Optional[GeodesicPath] = None

    def point_at(self, tau: float) -> ConePoint:
        tau = min(max(tau, 0.0), self.length)
        s, t = self.u.r, self.v.r
        if self.kind == "trivial":
            return self.u
        if self.kind == "radial":
            if self.u.is_apex:
                return ConePoint(self.v.base, tau) if tau > 0 else apex()
            r = s - tau if (self.v.is_apex or t < s) else s + tau
            return ConePoint(self.u.base, r) if r > 1e-15 else apex()
        if self.kind == "apex":
            if tau < s:
                return ConePoint(self.u.base, s - tau)
            if tau > s:
                return ConePoint(self.v.base, tau - s)
            return apex()
        # developed chord
        ax, ay = s, 0.0
        bx, by = t * math.cos(self.ell), t * math.sin(self.ell)
        lam = tau / self.length
        px, py = ax + lam * (bx - ax), ay + lam * (by - ay)
        r = math.hypot(px, py)
        phi = _clamp_phi(math.atan2(py, px), self.ell)
        return ConePoint(self.base_path.point_at(phi), r)

    def min_radius(self) -> float:
        if self.kind in ("radial", "apex"):
            return 0.0 if self.kind == "apex" or self.u.is_apex or self.v.is_apex \
                else min(self.u.r, self.v.r)
        if self.kind == "trivial":
            return self.u.r
        s, t = self.u.r, self.v.r
        d2 = self.length * self.length
        lam_star = s * (s - t * math.cos(self.ell)) / d2
        if 0.0 <= lam_star <= 1.0:
            return s * t * math.sin(self.ell) / self.length
        return min(s, t)

    def crossings(self) -> list[tuple[float, ConePoint]]:
        """Path sampled at endpoints and every base-vertex crossing."""
        pts = [(0.0, self.u)]
        if self.kind == "apex":
            pts.append((self.u.r, apex()))
        elif self.kind == "developed":
            s, t = self.u.r, self.v.r
            acc = 0.0
            for seg, a, b in self.base_path.steps[:-1]:
                acc += abs(b - a)
                phi = acc
                lam = s * math.sin(phi) / (s * math.sin(phi) + t * math.sin(self.ell - phi))
                tau = lam * self.length
                pts.append((tau, self.point_at(tau)))
        pts.append((self.length, self.v))
        return pts


def _clamp_phi(phi: float, ell: float) -> float:
    if phi < 0.0:
        return 0.0
    if phi > ell:
        return ell
    return phi


def cone_geodesic(K: ConeSpace, u: ConePoint, v: ConePoint) -> ConeGeodesic:
    if cone_points_equal(u, v):
        return ConeGeodesic(K, u, v, "trivial", 0.0)
    if u.is_apex or v.is_apex:
        return ConeGeodesic(K, u, v, "radial", cone_distance(K, u, v))
    if geodesy.points_equal(u.base, v.base):
        return ConeGeodesic(K, u, v, "radial", abs(u.r - v.r))
    l_raw = geodesy.distance(K.base, u.base, v.base, truncated=False)
    if l_raw >= PI:
        return ConeGeodesic(K, u, v, "apex", u.r + v.r, ell=PI)
    base_path = geodesy.one_shortest_path(K.base, u.base, v.base)
    d = cone_distance(K, u, v)
    return ConeGeodesic(K, u, v, "developed", d, ell=l_raw, base_path=base_path)


# ---------------------------------------------------------------------------
# spaces of directions


@dataclass
class DirectionModel:
    """Realization of a space of directions.

    Variants: 'base_graph' (at the apex), 'circle_2pi' (interior of a
    sector), 'suspension_d' (over a degree-d base vertex), 'discrete_pi'
    (direction set of a graph point).  Graph variants expose the
    realizing spherical graph; arcs of a suspension are indexed by the
    base direction tokens they correspond to, with external vertex 0 the
    outward radial pole and 1 the inward one.
    """

    variant: str
    space: SphericalGraph | DiscretePiSet
    arc_tokens: Optional[list[DirToken]] = None

    @property
    def dim(self) -> int:
        return 0 if isinstance(self.space, DiscretePiSet) else 1

    def outward_pole(self) -> GraphPoint:
        return self.space.vertex_point(0)

    def inward_pole(self) -> GraphPoint:
        return self.space.vertex_point(1)

    def point_from_angle(self, token: DirToken, alpha: float) -> GraphPoint:
        """Direction at polar angle alpha in [0, pi] from the outward
        radial, on the side of the given base direction token."""
        if self.arc_tokens is None:
            raise PreconditionError("angle coordinates need a suspension model")
        if not (0.0 <= alpha <= PI + 1e-12):
            raise PreconditionError("polar angle outside [0, pi]")
        if alpha <= 1e-12:
            return self.outward_pole()
        if alpha >= PI - 1e-12:
            return self.inward_pole()
        arc = self.arc_tokens.index(token)
        return self.space.point_on_edge(arc, alpha)

    def distance(self, a, b) -> float:
        if isinstance(self.space, DiscretePiSet):
            return self.space.distance(a, b)
        return geodesy.distance(self.space, a, b, truncated=True)

    def antipodal_distance(self, a, b) -> tuple[float, float]:
        if isinstance(self.space, DiscretePiSet):
            return self.space.antipodal_distance(a, b)
        return geodesy.antipodal_distance(self.space, a, b)

    def describe_point(self, p) -> dict | str:
        if isinstance(self.space, DiscretePiSet):
            return str(p)
        return self.space.external_locus(p)

    def to_json(self) -> dict:
        doc = {"variant": self.variant, "dim": self.dim}
        if isinstance(self.space, DiscretePiSet):
            doc["cardinality"] = self.space.cardinality
        else:
            doc["total_length"] = self.space.total_length
        return doc


def discrete_direction_model(g: SphericalGraph, x: GraphPoint) -> DirectionModel:
    return DirectionModel("discrete_pi", geodesy.direction_space_graph(g, x))


def space_of_directions(K: ConeSpace, p: ConePoint) -> DirectionModel:
    from .spaces import make_suspension

    if p.is_apex:
        return DirectionModel("base_graph", K.base)
    tokens = geodesy.direction_tokens_at(K.base, p.base)
    d = len(tokens)
    variant = "circle_2pi" if d == 2 else f"suspension_{d}"
    return DirectionModel(variant, make_suspension(d), arc_tokens=tokens)


@dataclass
class Direction:
    """Initial direction of a cone geodesic, as a point of a model."""

    model: DirectionModel
    point: GraphPoint
    token: Optional[DirToken] = None
    angle: Optional[float] = None

    def to_json(self) -> dict:
        doc = {"point": self.model.describe_point(self.point)}
        if self.angle is not None:
            doc["polar_angle"] = self.angle
        return doc


def direction_at(K: ConeSpace, p: ConePoint, a: ConePoint,
                 model: Optional[DirectionModel] = None) -> list[Direction]:
    """Directions at p of the shortest path(s) toward a, in Sigma_p."""
    if cone_points_equal(p, a):
        raise PreconditionError("direction undefined toward the point itself")
    if model is None:
        model = space_of_directions(K, p)
    if p.is_apex:
        return [Direction(model, a.base)]
    if a.is_apex:
        return [Direction(model, model.inward_pole(), angle=PI)]
    if geodesy.points_equal(p.base, a.base):
        if a.r > p.r:
            return [Direction(model, model.outward_pole(), angle=0.0)]
        return [Direction(model, model.inward_pole(), angle=PI)]
    l_raw = geodesy.distance(K.base, p.base, a.base, truncated=False)
    if l_raw >= PI:
        return [Direction(model, model.inward_pole(), angle=PI)]
    token = geodesy.one_shortest_path(K.base, p.base, a.base).initial_direction()
    s, t = p.r, a.r
    D = cone_distance(K, p, a)
    beta = math.acos(_clamp((s * s + D * D - t * t) / (2.0 * s * D)))
    alpha = PI - beta
    return [Direction(model, model.point_from_angle(token, alpha), token, alpha)]


# ---------------------------------------------------------------------------
# comparison angles


def comparison_angle(d_ap: float, d_px: float, d_ax: float,
                     model: str = "euclidean") -> float:
    """Angle at p of the comparison triangle with the given side lengths."""
    if d_ap <= 0 or d_px <= 0:
        raise PreconditionError("comparison angle needs positive sides at p")
    if d_ax < 0:
        raise PreconditionError("negative side length")
    if d_ax > d_ap + d_px + 1e-12 or d_ap > d_px + d_ax + 1e-12 \
            or d_px > d_ap + d_ax + 1e-12:
        raise PreconditionError("triangle inequality violated")
    if model == "euclidean":
        c = (d_ap * d_ap + d_px * d_px - d_ax * d_ax) / (2.0 * d_ap * d_px)
        return math.acos(_clamp(c))
    if model == "spherical":
        if max(d_ap, d_px, d_ax) > PI + 1e-12:
            raise PreconditionError("spherical sides must not exceed pi")
        if d_ap + d_px + d_ax > 2 * PI + 1e-12:
            raise PreconditionError("spherical perimeter must not exceed 2*pi")
        num = math.cos(d_ax) - math.cos(d_ap) * math.cos(d_px)
        den = math.sin(d_ap) * math.sin(d_px)
        if den == 0.0:
            raise PreconditionError("degenerate spherical triangle")
        return math.acos(_clamp(num / den))
    raise PreconditionError(f"unknown comparison model {model!r}")


def angle_between(K: ConeSpace, p: ConePoint, a: ConePoint, b: ConePoint) -> float:
    """Angle at p between the directions toward a and b (worst pair if a
    direction set were ever multivalued)."""
    model = space_of_directions(K, p)
    da = direction_at(K, p, a, model)
    db = direction_at(K, p, b, model)
    return max(model.distance(x.point, y.point) for x in da for y in db)


# ---------------------------------------------------------------------------
# local moves and vectorized distances (shared by solvers)


def walk_base(g: SphericalGraph, base: GraphPoint, token: DirToken,
              dist: float) -> GraphPoint:
    """Move a base point a given arc length along a direction token,
    continuing through vertices by lowest segment id."""
    if dist <= 0:
        return base
    if base.vertex is None:
        t0 = base.t
        l = g.seg_len[base.seg]
        run = min(dist, l - t0 if token.sign > 0 else t0)
        t1 = t0 + run if token.sign > 0 else t0 - run
        path = GeodesicPath(g, base, g.seg_point(base.seg, t1), [(base.seg, t0, t1)])
    else:
        l = g.seg_len[token.seg]
        t0 = 0.0 if token.sign > 0 else l
        run = min(dist, l)
        t1 = t0 + run if token.sign > 0 else t0 - run
        path = GeodesicPath(g, base, g.seg_point(token.seg, t1), [(token.seg, t0, t1)])
    rest = dist - run
    if rest > 1e-15:
        path = geodesy.extend_path(g, path, rest)
    return path.end


def perturbations(K: ConeSpace, y: ConePoint, h: float) -> list[ConePoint]:
    """Deterministic neighbours of a cone point at scale h: radius moves
    and base moves of arc length h/r along every available direction."""
    from .spaces import cone_point

    g = K.base
    out: list[ConePoint] = []
    if y.is_apex:
        for s in range(g.n_segments):
            out.append(cone_point(g.seg_point(s, min(h, g.seg_len[s] * 0.5)), h))
        return out
    out.append(cone_point(y.base, y.r + h))
    out.append(cone_point(y.base, y.r - h) if y.r > h else apex())
    arc = min(h / max(y.r, 1e-9), PI)
    for tok in geodesy.direction_tokens_at(g, y.base):
        out.append(cone_point(walk_base(g, y.base, tok, arc), y.r))
    return out


def distances_from(K: ConeSpace, a: ConePoint, segs: np.ndarray, ts: np.ndarray,
                   rs: np.ndarray) -> np.ndarray:
    """Cone distances from a fixed point to arrays of (segment, offset,
    radius) points."""
    rs = np.asarray(rs, dtype=float)
    if a.is_apex:
        return rs.copy()
    from .geodesy import DistanceData

    dd = DistanceData(K.base, a.base)
    L = np.asarray(K.base.seg_len)
    l = np.minimum(dd.A[segs] + ts, dd.B[segs] + L[segs] - ts)
    if dd.own_seg >= 0:
        own = segs == dd.own_seg
        if np.any(own):
            l = np.where(own, np.minimum(l, np.abs(ts - dd.t_src)), l)
    l = np.minimum(l, PI)
    return np.sqrt(np.maximum(a.r ** 2 + rs ** 2 - 2.0 * a.r * rs * np.cos(l), 0.0))


# ---------------------------------------------------------------------------
# sampled CAT(0) four-point validation


def _pairwise_base_distance(g: SphericalGraph, seg1, t1, seg2, t2) -> np.ndarray:
    D = g.vertex_distances
    su = np.asarray(g.seg_u)
    sv = np.asarray(g.seg_v)
    L = np.asarray(g.seg_len)
    a1, b1, l1 = su[seg1], sv[seg1], L[seg1]
    a2, b2, l2 = su[seg2], sv[seg2], L[seg2]
    d = np.minimum.reduce([
        t1 + D[a1, a2] + t2,
        t1 + D[a1, b2] + (l2 - t2),
        (l1 - t1) + D[b1, a2] + t2,
        (l1 - t1) + D[b1, b2] + (l2 - t2),
    ])
    same = seg1 == seg2
    if np.any(same):
        d[same] = np.minimum(d[same], np.abs(t1[same] - t2[same]))
    return d


def four_point_check(K: ConeSpace, quadruples: int, seed: int) -> float:
    """Worst violation of the CAT(0) quadrilateral inequality
    d(1,3)^2 + d(2,4)^2 <= d(1,2)^2 + d(2,3)^2 + d(3,4)^2 + d(4,1)^2
    over random quadruples."""
    g = K.base
    rng = np.random.default_rng(seed)
    n = quadruples
    segs = rng.integers(0, g.n_segments, size=(4, n))
    L = np.asarray(g.seg_len)
    ts = rng.random((4, n)) * L[segs]
    rs = rng.random((4, n)) * 2.0

    def cdist(i, j):
        l = np.minimum(_pairwise_base_distance(g, segs[i], ts[i], segs[j], ts[j]), PI)
        return np.sqrt(np.maximum(
            rs[i] ** 2 + rs[j] ** 2 - 2.0 * rs[i] * rs[j] * np.cos(l), 0.0))

    diag = cdist(0, 2) ** 2 + cdist(1, 3) ** 2
    sides = cdist(0, 1) ** 2 + cdist(1, 2) ** 2 + cdist(2, 3) ** 2 + cdist(3, 0) ** 2
    return float(np.max(diag - sides))
