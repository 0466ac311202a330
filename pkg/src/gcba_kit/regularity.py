"""Noncriticality of collections and distance maps.

A collection (xi_1..xi_k, eta) in a direction-space model is noncritical
when every pairwise antipodal distance stays below pi/2 + delta and some
witness direction eta keeps all antipodal distances below pi/2 - eps.
Everything here reports signed margins rather than bare booleans; the
symbolic constants of the underlying theory are replaced by measured
values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import cones, geodesy
from .cones import ConeSpace, comparison_angle, space_of_directions
from .errors import InternalConsistencyError, NoWitnessError, PreconditionError
from .geodesy import DiscretePiSet, antipodal_field, point_field
from .spaces import PI, TAU, ConePoint, GraphPoint, SphericalGraph, apex, cone_point

ModelSpace = SphericalGraph | DiscretePiSet


def model_antipodal(space: ModelSpace, a, b) -> tuple[float, float]:
    if isinstance(space, DiscretePiSet):
        return space.antipodal_distance(a, b)
    return geodesy.antipodal_distance(space, a, b)


def model_distance(space: ModelSpace, a, b) -> float:
    if isinstance(space, DiscretePiSet):
        return space.distance(a, b)
    return geodesy.distance(space, a, b, truncated=True)


def model_dim(space: ModelSpace) -> int:
    return 0 if isinstance(space, DiscretePiSet) else 1


def describe_model_point(space: ModelSpace, p) -> Any:
    if isinstance(space, DiscretePiSet):
        return str(p)
    return space.external_locus(p)


@dataclass
class Collection:
    """Candidate noncritical collection in a direction-space model."""

    space: ModelSpace
    xis: list
    eta: Optional[Any] = None

    @property
    def k(self) -> int:
        return len(self.xis)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "xis": [describe_model_point(self.space, x) for x in self.xis],
            "eta": None if self.eta is None else describe_model_point(self.space, self.eta),
        }


@dataclass
class MarginReport:
    """Measured noncriticality margins.

    ``eps_margin`` is min_i (pi/2 - antipodal(xi_i, eta)); the verdict
    needs it above eps.  ``delta_margin`` is max_{i<j} antipodal(xi_i,
    xi_j) - pi/2 (negative is good); the verdict needs it below delta.
    """

    eps: float
    delta: float
    k: int
    eps_margin: float
    delta_margin: Optional[float]
    verdict: bool
    pair_values: list[float] = field(default_factory=list)
    eta_values: list[float] = field(default_factory=list)
    method_gap_max: float = 0.0
    aux: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "k": self.k,
            "eps_margin": self.eps_margin,
            "delta_margin": self.delta_margin,
            "verdict": self.verdict,
            "pair_antipodal": self.pair_values,
            "eta_antipodal": self.eta_values,
            "method_gap_max": self.method_gap_max,
            "aux": self.aux,
        }


def _verdict(eps: float, delta: float, eps_margin: float,
             delta_margin: Optional[float]) -> bool:
    return (delta_margin is None or delta_margin < delta) and eps_margin > eps


def check_collection(space: ModelSpace, coll: Collection, eps: float,
                     delta: float) -> MarginReport:
    """Margins of the two noncriticality conditions for a collection.

    On a passing verdict the plain-distance consequences (pairwise
    separation above pi/2 - delta, witness separation above pi/2 + eps,
    and for k >= 2 with delta < eps/2 the complementary upper bounds)
    are asserted; a violation would mean the antipodal distance itself
    is broken and raises an internal-consistency error.
    """
    if coll.eta is None:
        raise PreconditionError("collection check needs a witness direction eta")
    xs, eta = coll.xis, coll.eta
    k = len(xs)
    if k < 1:
        raise PreconditionError("collection needs at least one point")
    gap = 0.0
    pair_vals: list[float] = []
    for i, j in itertools.combinations(range(k), 2):
        v, g = model_antipodal(space, xs[i], xs[j])
        pair_vals.append(v)
        gap = max(gap, g)
    eta_vals: list[float] = []
    for x in xs:
        v, g = model_antipodal(space, x, eta)
        eta_vals.append(v)
        gap = max(gap, g)
    delta_margin = max(pair_vals) - PI / 2 if pair_vals else None
    eps_margin = PI / 2 - max(eta_vals)
    verdict = _verdict(eps, delta, eps_margin, delta_margin)

    plain_pairs = [model_distance(space, xs[i], xs[j])
                   for i, j in itertools.combinations(range(k), 2)]
    plain_eta = [model_distance(space, x, eta) for x in xs]
    if verdict:
        slack = 1e-9
        if any(d <= PI / 2 - delta - slack for d in plain_pairs):
            raise InternalConsistencyError("pairwise distance consequence failed")
        if any(d <= PI / 2 + eps - slack for d in plain_eta):
            raise InternalConsistencyError("witness distance consequence failed")
        if k >= 2 and delta < eps / 2:
            if any(d >= PI - 2 * eps + slack for d in plain_pairs):
                raise InternalConsistencyError("pairwise upper consequence failed")
            if any(d >= PI - eps / 2 + slack for d in plain_eta):
                raise InternalConsistencyError("witness upper consequence failed")

    return MarginReport(
        eps, delta, k, eps_margin, delta_margin, verdict,
        pair_vals, eta_vals, gap,
        aux={"plain_pair_distances": plain_pairs, "plain_eta_distances": plain_eta,
             "dim": model_dim(space)})


# ---------------------------------------------------------------------------
# distance maps at a cone point


def check_map_at_point(K: ConeSpace, p: ConePoint, a_list: Sequence[ConePoint],
                       b: ConePoint, eps: float, delta: float) -> MarginReport:
    """Noncriticality of the distance map (|a_1 .|, ..., |a_k .|) at p,
    with witness point b, checked over every combination of directions
    (the conservative reading when any direction set is multivalued)."""
    for a in a_list:
        if cones.cone_points_equal(a, p):
            raise PreconditionError("an anchor point coincides with p")
    if cones.cone_points_equal(b, p):
        raise PreconditionError("the witness point coincides with p")
    model = space_of_directions(K, p)
    dir_sets = [cones.direction_at(K, p, a, model) for a in a_list]
    b_dirs = cones.direction_at(K, p, b, model)

    worst: Optional[MarginReport] = None
    combos = 0
    for choice in itertools.product(*dir_sets):
        for b_dir in b_dirs:
            combos += 1
            coll = Collection(model.space, [d.point for d in choice], b_dir.point)
            rep = check_collection(model.space, coll, eps, delta)
            if worst is None or (rep.eps_margin, -(rep.delta_margin or -math.inf)) < \
                    (worst.eps_margin, -(worst.delta_margin or -math.inf)):
                worst = rep
    dim_tp = model.dim + 1
    worst.aux.update({
        "model": model.to_json(),
        "combinations": combos,
        "dim_T_p": dim_tp,
        "k_le_dim_T_p": len(a_list) <= dim_tp,
        "directions": [[d.to_json() for d in ds] for ds in dir_sets],
        "witness_directions": [d.to_json() for d in b_dirs],
    })
    return worst


def _ball_net(K: ConeSpace, p: ConePoint, rho: float, h: float) -> list[ConePoint]:
    """Deterministic net of the punctured ball B(p, rho) \\ {p}.

    ``h`` is the cone-metric resolution; base spacing is h divided by
    the largest radius in the ball, since base separation shrinks by
    the radius factor in the cone metric.
    """
    g = K.base
    h_base = h / max(p.r + rho, h)
    base_pts: list[GraphPoint] = []
    seen_vertices: set[int] = set()
    for s in range(g.n_segments):
        l = g.seg_len[s]
        m = max(1, math.ceil(l / h_base))
        for i in range(m + 1):
            pt = g.seg_point(s, l * i / m)
            if pt.vertex is not None:
                if pt.vertex in seen_vertices:
                    continue
                seen_vertices.add(pt.vertex)
            base_pts.append(pt)
    r_lo = max(0.0, p.r - rho)
    r_hi = p.r + rho
    radii = []
    r = max(r_lo, h)
    while r <= r_hi + 1e-12:
        radii.append(r)
        r += h
    net: list[ConePoint] = []
    for z in base_pts:
        for r in radii:
            x = cone_point(z, r)
            d = cones.cone_distance(K, p, x)
            if 1e-12 < d < rho:
                net.append(x)
    if 1e-12 < p.r < rho:
        net.append(apex())
    return net


def check_map_rho(K: ConeSpace, p: ConePoint, a_list: Sequence[ConePoint],
                  b: ConePoint, eps: float, delta: float, rho: float,
                  resolution: float = 0.05, verify_ball: bool = False) -> MarginReport:
    """Comparison-angle noncriticality over an h-net of B(p, rho).

    Condition (1): comparison angles at p toward a_i and a_j from any x
    in the ball sum below 3*pi/2 + delta; condition (2): toward a_i and
    b they sum below 3*pi/2 - eps.  Margins follow the same convention
    as check_collection: delta_margin = worst sum - 3*pi/2, eps_margin =
    3*pi/2 - worst sum.
    """
    if rho <= 0 or resolution <= 0:
        raise PreconditionError("rho and resolution must be positive")
    d_ap = [cones.cone_distance(K, p, a) for a in a_list]
    d_bp = cones.cone_distance(K, p, b)
    if min(d_ap) <= rho:
        raise PreconditionError("every |a_i p| must exceed rho")
    if d_bp <= rho:
        raise PreconditionError("|b p| must exceed rho")
    net = _ball_net(K, p, rho, resolution)
    if not net:
        raise PreconditionError("empty net; lower the resolution")

    k = len(a_list)
    worst_pair = -math.inf
    worst_eta = -math.inf
    for x in net:
        d_px = cones.cone_distance(K, p, x)
        ang = [comparison_angle(d_ap[i], d_px, cones.cone_distance(K, a_list[i], x))
               for i in range(k)]
        ang_b = comparison_angle(d_bp, d_px, cones.cone_distance(K, b, x))
        for i, j in itertools.combinations(range(k), 2):
            worst_pair = max(worst_pair, ang[i] + ang[j])
        for i in range(k):
            worst_eta = max(worst_eta, ang[i] + ang_b)
    delta_margin = worst_pair - 1.5 * PI if k >= 2 else None
    eps_margin = 1.5 * PI - worst_eta
    rep = MarginReport(eps, delta, k, eps_margin, delta_margin,
                       _verdict(eps, delta, eps_margin, delta_margin))
    rep.aux.update({"rho": rho, "h": resolution, "net_size": len(net),
                    "worst_pair_angle_sum": worst_pair if k >= 2 else None,
                    "worst_witness_angle_sum": worst_eta})
    if verify_ball:
        ball = rho * delta
        sub = [x for x in _ball_net(K, p, ball, max(resolution * delta, ball / 6))]
        sub_worst_eps = math.inf
        sub_worst_delta = -math.inf
        for x in sub:
            r = check_map_at_point(K, x, a_list, b, eps, delta)
            sub_worst_eps = min(sub_worst_eps, r.eps_margin)
            if r.delta_margin is not None:
                sub_worst_delta = max(sub_worst_delta, r.delta_margin)
        rep.aux["ball_check"] = {
            "radius": ball,
            "net_size": len(sub),
            "worst_eps_margin": sub_worst_eps if sub else None,
            "worst_delta_margin": sub_worst_delta if sub and k >= 2 else None,
        }
    return rep


# ---------------------------------------------------------------------------
# searches


def search_regular_direction(space: ModelSpace, xis: Sequence) -> tuple[Any, float, dict]:
    """Maximize min_i (pi/2 - antipodal(xi_i, eta)) over eta.

    On graphs the objective is piecewise linear per segment, so the
    optimum is found exactly at breakpoints; a negative margin proves no
    regular direction exists.
    """
    if not xis:
        raise PreconditionError("need at least one xi")
    if isinstance(space, DiscretePiSet):
        best = None
        for eta in space.points:
            val = max(space.antipodal_distance(x, eta)[0] for x in xis)
            key = (-(PI / 2 - val), str(eta))
            if best is None or key < best[0]:
                best = (key, eta, PI / 2 - val)
        return best[1], best[2], {"candidates": space.cardinality}
    fields = [antipodal_field(space, x) for x in xis]
    obj = fields[0]
    for f in fields[1:]:
        obj = obj.maximum(f)
    eta, val = obj.global_min()
    return eta, PI / 2 - val, {"breakpoints": sum(len(f.xs) for f in obj.fields)}


def find_v(space: ModelSpace, coll: Collection, eps: float,
           delta: float) -> tuple[Any, dict]:
    """Witness point v with d(v, xi_1) < pi/2, d(v, xi_i) = pi/2 for
    i >= 2, and d(v, eta) > pi/2, selected from the exact solution set
    of the equality constraints."""
    rep = check_collection(space, coll, eps, delta)
    if not rep.verdict:
        raise PreconditionError("collection is not noncritical at the given margins")
    xs, eta = coll.xis, coll.eta
    if isinstance(space, DiscretePiSet):
        v = xs[0]
        return v, _v_margins(space, v, xs, eta)

    if len(xs) == 1:
        f1 = point_field(space, xs[0], truncated=True)
        fe = point_field(space, eta, truncated=True)
        obj = (-f1).shift(PI / 2).minimum(fe.shift(-PI / 2))
        v, val = obj.global_max()
        if val <= 0:
            return _find_v_fallback(space, coll)
        return v, _v_margins(space, v, xs, eta)

    candidates = point_field(space, xs[1], truncated=False).solve_eq(PI / 2, TAU)
    for extra in xs[2:]:
        candidates = [v for v in candidates
                      if abs(model_distance(space, v, extra) - PI / 2) <= TAU]
    best = None
    for v in candidates:
        m = _v_margins(space, v, xs, eta)
        if m["m1"] > TAU and m["m2"] > TAU and m["eq_residual"] <= TAU:
            key = (-min(m["m1"], m["m2"]), v.sort_key())
            if best is None or key < best[0]:
                best = (key, v, m)
    if best is None:
        return _find_v_fallback(space, coll)
    return best[1], best[2]


def _v_margins(space: ModelSpace, v, xs, eta) -> dict:
    d1 = model_distance(space, v, xs[0])
    de = model_distance(space, v, eta)
    eq = [model_distance(space, v, x) for x in xs[1:]]
    return {
        "m1": PI / 2 - d1,
        "m2": de - PI / 2,
        "d_xi1": d1,
        "d_eta": de,
        "d_equalities": eq,
        "eq_residual": max((abs(d - PI / 2) for d in eq), default=0.0),
    }


def _find_v_fallback(space: SphericalGraph, coll: Collection):
    """Iterative scheme: walk from xi_1 toward eta and pick the first
    parameter meeting the equality constraints at tolerance."""
    xs, eta = coll.xis, coll.eta
    paths = geodesy.shortest_paths(space, xs[0], eta)
    if not paths:
        raise NoWitnessError("no geodesic toward the witness", coll.to_json())
    path = paths[0]
    steps = 400
    best = None
    for i in range(steps + 1):
        v = path.point_at(path.length * i / steps)
        m = _v_margins(space, v, xs, eta)
        score = min(m["m1"], m["m2"]) - 10.0 * m["eq_residual"]
        if best is None or score > best[0]:
            best = (score, v, m)
    _score, v, m = best
    if m["m1"] > 0 and m["m2"] > 0 and m["eq_residual"] <= 1e-6:
        return v, m
    raise NoWitnessError("no v found at tolerance", coll.to_json())


# ---------------------------------------------------------------------------
# dimension induction


def induction_step(space: SphericalGraph, coll: Collection, x: GraphPoint,
                   case: str, eps: float, delta: float) -> tuple[Collection, MarginReport]:
    """Project a noncritical collection to the discrete direction space
    at x.  Case 'near' requires every point inside B(x, pi/2 + delta);
    case 'far' requires every point outside B(x, pi/2 - delta).  Margins
    are evaluated for every combination of initial directions and the
    worst case is reported."""
    if case not in ("near", "far"):
        raise PreconditionError("case must be 'near' or 'far'")
    pts = list(coll.xis) + [coll.eta]
    for q in pts:
        if geodesy.points_equal(x, q):
            raise PreconditionError("x coincides with a collection point")
    dists = [model_distance(space, x, q) for q in pts]
    if case == "near" and any(d >= PI / 2 + delta + 1e-12 for d in dists):
        raise PreconditionError("near case needs all points inside B(x, pi/2 + delta)")
    if case == "far" and any(d <= PI / 2 - delta - 1e-12 for d in dists):
        raise PreconditionError("far case needs all points outside B(x, pi/2 - delta)")

    sigma_x = geodesy.direction_space_graph(space, x)
    xi_dirs = [geodesy.direction_of(space, x, q) for q in coll.xis]
    eta_dirs = geodesy.direction_of(space, x, coll.eta)

    worst = None
    per_combo = []
    first: Optional[Collection] = None
    for choice in itertools.product(*xi_dirs):
        for ed in eta_dirs:
            derived = Collection(sigma_x, list(choice), ed)
            rep = check_collection(sigma_x, derived, eps, delta)
            per_combo.append({
                "xis": [str(t) for t in choice], "eta": str(ed),
                "eps_margin": rep.eps_margin, "delta_margin": rep.delta_margin,
                "verdict": rep.verdict,
            })
            if first is None:
                first = derived
            if worst is None or (rep.eps_margin, -(rep.delta_margin or -math.inf)) < \
                    (worst.eps_margin, -(worst.delta_margin or -math.inf)):
                worst = rep
    worst.aux.update({"case": case, "combinations": per_combo,
                      "sigma_x_cardinality": sigma_x.cardinality,
                      "distances_to_x": dists})
    return first, worst


# ---------------------------------------------------------------------------
# differential openness certificate


@dataclass
class CertificateReport:
    """Outcome of the differential openness certificate over a sample."""

    eps: float
    entries: list[dict]

    @property
    def certified_fraction(self) -> float:
        if not self.entries:
            return 0.0
        return sum(1 for e in self.entries if e["certified"]) / len(self.entries)

    @property
    def worst_margin(self) -> float:
        return min((e["margin"] for e in self.entries), default=-math.inf)

    def to_json(self) -> dict:
        return {"eps": self.eps, "certified_fraction": self.certified_fraction,
                "worst_margin": self.worst_margin, "samples": self.entries}


def differential_certificate(K: ConeSpace, sample: Sequence[ConePoint],
                             a_list: Sequence[ConePoint], b: Optional[ConePoint],
                             eps: float) -> CertificateReport:
    """At each sample p, certify the differential conditions: for every
    coordinate there is a direction dropping it at rate below -eps while
    keeping the others exactly stationary, and one witness direction
    raising all coordinates at rate above eps.  Rates are -cos of the
    direction distance to each anchor direction, by first variation."""
    if not (0 < eps < 1):
        raise PreconditionError("eps must lie in (0, 1)")
    entries = []
    for p in sample:
        for a in a_list:
            if cones.cone_points_equal(a, p):
                raise PreconditionError("sample point coincides with an anchor")
        if b is not None and cones.cone_points_equal(b, p):
            raise PreconditionError("sample point coincides with the witness point")
        model = space_of_directions(K, p)
        a_pts = [cones.direction_at(K, p, a, model)[0].point for a in a_list]
        k = len(a_pts)
        entry: dict = {"p": K.external_locus(p)}
        margins = []

        # condition (1): per-coordinate descent directions
        xi_records = []
        for i in range(k):
            if k == 1:
                xi, eq_res = a_pts[0], 0.0
            else:
                others = [a_pts[j] for j in range(k) if j != i]
                cand = point_field(model.space, others[0], truncated=False).solve_eq(PI / 2, TAU)
                cand = [c for c in cand
                        if all(abs(model_distance(model.space, c, o) - PI / 2) <= TAU
                               for o in others[1:])]
                if not cand:
                    xi, eq_res = None, math.inf
                else:
                    xi = min(cand, key=lambda c: (model_distance(model.space, c, a_pts[i]),
                                                  c.sort_key()))
                    eq_res = max(abs(model_distance(model.space, xi, o) - PI / 2)
                                 for o in others)
            if xi is None:
                margins.append(-math.inf)
                xi_records.append({"found": False})
                continue
            rate = -math.cos(model_distance(model.space, xi, a_pts[i]))
            margin = (-rate) - eps
            margins.append(margin)
            xi_records.append({"found": True, "rate": rate, "margin": margin,
                               "eq_residual": eq_res,
                               "xi": describe_model_point(model.space, xi)})

        # condition (2): common ascent direction
        if isinstance(model.space, DiscretePiSet):
            best_eta, best_val = None, -math.inf
            for q in model.space.points:
                val = min(model.space.distance(q, ap) for ap in a_pts)
                if val > best_val:
                    best_eta, best_val = q, val
        else:
            obj = point_field(model.space, a_pts[0], truncated=True)
            for ap in a_pts[1:]:
                obj = obj.minimum(point_field(model.space, ap, truncated=True))
            best_eta, best_val = obj.global_max()
        eta_rate = -math.cos(best_val)
        eta_margin = eta_rate - eps
        margins.append(eta_margin)
        entry.update({
            "xi_conditions": xi_records,
            "eta": describe_model_point(model.space, best_eta),
            "eta_rate": eta_rate,
            "eta_margin": eta_margin,
            "margin": min(margins),
            "certified": min(margins) > 0,
        })
        if b is not None:
            b_pt = cones.direction_at(K, p, b, model)[0].point
            entry["witness_rate"] = -math.cos(
                min(model_distance(model.space, b_pt, ap) for ap in a_pts))
        entries.append(entry)
    return CertificateReport(eps, entries)
