"""Empirical verifiers for whole-map properties.

Openness and bi-Lipschitz estimates for noncritical distance maps,
noncriticality of the extended map on fiber spheres, the cone-over-a-
circle feasibility sweep, and the circle-to-sphere comparison map.  All
symbolic constants of the theory appear here as measured quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import cones, regularity
from .cones import ConeSpace, cone_distance, space_of_directions
from .errors import InternalConsistencyError, PreconditionError
from .geodesy import antipodal_field
from .parallel import ordered_map
from .regularity import Collection, check_collection, search_regular_direction
from .retraction import FiberSpec, sample_fiber
from .spaces import PI, TWO_PI, ConePoint, GraphPoint, SphericalGraph, cone_point, make_circle


# ---------------------------------------------------------------------------
# openness and bi-Lipschitz estimates


@dataclass
class OpennessReport:
    """Empirical openness constant and, when k equals the local
    dimension, sampled bi-Lipschitz data."""

    c_emp: float
    radii: list[float]
    n_samples: int
    n_targets: int
    per_radius: list[dict]
    verification: Optional[dict] = None
    injectivity: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "c_emp": self.c_emp,
            "radii": self.radii,
            "n_samples": self.n_samples,
            "n_targets": self.n_targets,
            "per_radius": self.per_radius,
            "verification": self.verification,
            "injectivity": self.injectivity,
        }


def _map_values(K: ConeSpace, a_list: Sequence[ConePoint], x: ConePoint) -> np.ndarray:
    return np.array([cone_distance(K, a, x) for a in a_list])


def _preimage_search(K: ConeSpace, a_list: Sequence[ConePoint], target: np.ndarray,
                     x: ConePoint, r: float, tol: float = 1e-6) -> Optional[ConePoint]:
    """Multistart pattern search for y in the closed ball around x with
    f(y) = target; returns None only after every seed stalls."""

    def err(y: ConePoint) -> float:
        return float(np.linalg.norm(_map_values(K, a_list, y) - target))

    seeds = [x]
    for h in (r * 0.5, r * 0.9):
        for cand in cones.perturbations(K, x, h):
            if cone_distance(K, x, cand) <= r + 1e-12:
                seeds.append(cand)
    best_overall = None
    for seed in seeds[:9]:
        y, fy = seed, err(seed)
        h = r * 0.5
        while h > 1e-11 and fy > tol * 0.25:
            improved = False
            for cand in cones.perturbations(K, y, h):
                if cone_distance(K, x, cand) > r + 1e-12:
                    continue
                e = err(cand)
                if e < fy - 1e-15:
                    y, fy = cand, e
                    improved = True
            if not improved:
                h *= 0.5
        if fy <= tol:
            return y
        if best_overall is None or fy < best_overall[1]:
            best_overall = (y, fy)
    return None


def _targets_on_sphere(f0: np.ndarray, radius: float, m: int) -> list[np.ndarray]:
    k = len(f0)
    if k == 1:
        return [f0 + radius, f0 - radius]
    out = []
    for j in range(m):
        ang = TWO_PI * j / m
        out.append(f0 + radius * np.array([math.cos(ang), math.sin(ang)]))
    return out


def _ball_samples(K: ConeSpace, p: ConePoint, r: float, n: int, seed: int) -> list[ConePoint]:
    rng = np.random.default_rng(seed)
    g = K.base
    pts = [p] if not p.is_apex else []
    lo, hi = max(p.r - r, 0.0), p.r + r
    guard = 0
    while len(pts) < n and guard < 100 * n:
        guard += 1
        s = int(rng.integers(0, g.n_segments))
        t = float(rng.random()) * g.seg_len[s]
        rad = lo + float(rng.random()) * (hi - lo)
        if rad <= r * 1e-3:
            continue
        x = cone_point(g.seg_point(s, t), rad)
        if cone_distance(K, p, x) < r:
            pts.append(x)
    if len(pts) < n:
        raise InternalConsistencyError("could not sample the ball")
    return pts


def openness_estimate(K: ConeSpace, p: ConePoint, a_list: Sequence[ConePoint],
                      b: ConePoint, eps: float, delta: float,
                      r_list: Sequence[float], n_samples: int = 6,
                      n_targets: int = 32, seed: int = 7,
                      verify_targets: int = 0,
                      injectivity_pairs: int = 0) -> OpennessReport:
    """Largest empirical c with B(f(x), c r) inside f(B(x, r)) across
    sampled centers, found by bisection over c with preimages solved by
    multistart local search."""
    base_rep = regularity.check_map_at_point(K, p, a_list, b, eps, delta)
    if not base_rep.verdict:
        raise PreconditionError("the map is not noncritical at p")
    k = len(a_list)
    r_max = max(r_list)
    samples = _ball_samples(K, p, r_max, n_samples, seed)

    def inclusion_holds(c: float, r: float, m: int, pts: Sequence[ConePoint]) -> int:
        failures = 0
        for x in pts:
            f0 = _map_values(K, a_list, x)
            for w in _targets_on_sphere(f0, c * r, m):
                if _preimage_search(K, a_list, w, x, r) is None:
                    failures += 1
        return failures

    per_radius = []
    c_emp = math.inf
    for r in r_list:
        lo, hi = 0.0, 1.0
        for _ in range(10):
            mid = 0.5 * (lo + hi)
            if inclusion_holds(mid, r, n_targets, samples) == 0:
                lo = mid
            else:
                hi = mid
        per_radius.append({"r": r, "c_emp": lo})
        c_emp = min(c_emp, lo)

    verification = None
    if verify_targets > 0 and c_emp > 0:
        fails = inclusion_holds(c_emp / 2.0, min(r_list), verify_targets, samples)
        verification = {"c": c_emp / 2.0, "targets": verify_targets * len(samples) * (2 if k == 1 else 1),
                        "failures": fails}

    injectivity = None
    model = space_of_directions(K, p)
    if k == model.dim + 1 and injectivity_pairs > 0:
        injectivity = _injectivity_scan(K, p, a_list, min(r_list), injectivity_pairs, seed + 1)
    return OpennessReport(c_emp, list(r_list), len(samples), n_targets,
                          per_radius, verification, injectivity)


def _injectivity_scan(K: ConeSpace, p: ConePoint, a_list: Sequence[ConePoint],
                      r: float, n_pairs: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    g = K.base
    n_pts = max(int(math.isqrt(2 * n_pairs)) + 2, 16)
    lo, hi = max(p.r - r, 0.0), p.r + r
    segs, ts, rs = [], [], []
    guard = 0
    while len(segs) < n_pts and guard < 200 * n_pts:
        guard += 1
        s = int(rng.integers(0, g.n_segments))
        t = float(rng.random()) * g.seg_len[s]
        rad = lo + float(rng.random()) * (hi - lo)
        if rad <= r * 1e-3:
            continue
        if cone_distance(K, p, cone_point(g.seg_point(s, t), rad)) < r:
            segs.append(s), ts.append(t), rs.append(rad)
    segs = np.array(segs)
    ts = np.array(ts)
    rs = np.array(rs)
    F = np.stack([cones.distances_from(K, a, segs, ts, rs) for a in a_list], axis=1)
    iu, ju = np.triu_indices(len(segs), k=1)
    if len(iu) > n_pairs:
        keep = rng.choice(len(iu), size=n_pairs, replace=False)
        iu, ju = iu[keep], ju[keep]
    df = F[iu] - F[ju]
    sup = np.abs(df).max(axis=1)
    euc = np.linalg.norm(df, axis=1)
    d_xy = _pairwise_cone(K, segs, ts, rs, iu, ju)
    ok = d_xy > 1e-7  # genuinely distinct sample pairs
    ratios = euc[ok] / d_xy[ok]
    violations = int(np.sum((sup <= 1e-9) & ok))
    return {
        "pairs": int(len(iu)),
        "injective": violations == 0,
        "violations": violations,
        "min_ratio": float(ratios.min()),
        "max_ratio": float(ratios.max()),
    }


def _pairwise_cone(K: ConeSpace, segs, ts, rs, iu, ju) -> np.ndarray:
    l = cones._pairwise_base_distance(K.base, segs[iu], ts[iu], segs[ju], ts[ju])
    l = np.minimum(l, PI)
    return np.sqrt(np.maximum(rs[iu] ** 2 + rs[ju] ** 2
                              - 2.0 * rs[iu] * rs[ju] * np.cos(l), 0.0))


# ---------------------------------------------------------------------------
# fiber-sphere noncriticality (extended map)


def extended_margins_at(spec: FiberSpec, x: ConePoint) -> dict:
    """Noncriticality margins of the extended collection (anchors plus
    the center p) in the direction space at a fiber point x.  The
    regular direction is searched exactly over the model."""
    model = space_of_directions(spec.K, x)
    pts = [cones.direction_at(spec.K, x, a, model)[0].point for a in spec.a_list]
    pts.append(cones.direction_at(spec.K, x, spec.p, model)[0].point)
    worst_pair = -math.inf
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            v, _gap = regularity.model_antipodal(model.space, pts[i], pts[j])
            worst_pair = max(worst_pair, v)
    eta, eta_margin, _aux = search_regular_direction(model.space, pts)
    return {
        "r": cone_distance(spec.K, spec.p, x),
        "delta_margin": worst_pair - PI / 2,
        "eps_margin": eta_margin,
        "eta": regularity.describe_model_point(model.space, eta),
    }


def fiber_sphere_check(spec: FiberSpec, r_list: Sequence[float],
                       n: int = 12) -> list[dict]:
    """Margins of the extended map (f, |p .|) on fiber spheres of the
    given radii; the band [0.6 r, r] of sampled fiber points stands in
    for the exact sphere."""
    dim_tp = 2
    if spec.k >= dim_tp:
        raise PreconditionError("fiber-sphere check needs k < dim T_p")
    out = []
    for r in r_list:
        pts = sample_fiber(spec, r, max(n, 8))
        band = [x for x in pts if cone_distance(spec.K, spec.p, x) >= 0.6 * r]
        if not band:
            raise InternalConsistencyError(f"empty fiber sphere at radius {r}")
        margins = [extended_margins_at(spec, x) for x in band]
        out.append({
            "r": r,
            "n_samples": len(band),
            "sample_radii": [m["r"] for m in margins],
            "delta_margin": max(m["delta_margin"] for m in margins),
            "eps_margin": min(m["eps_margin"] for m in margins),
        })
    return out


# ---------------------------------------------------------------------------
# feasibility sweep over cone angles


@dataclass
class SweepRow:
    theta: float
    k: int
    best_margin: float
    xi2: Optional[float] = None
    eta: Optional[float] = None

    def to_json(self) -> dict:
        return {"theta": self.theta, "k": self.k, "best_margin": self.best_margin,
                "xi2": self.xi2, "eta": self.eta}


def _coordinate(g: SphericalGraph, p: GraphPoint) -> float:
    return g.seg_start[p.seg] + p.t


def _sweep_point(theta: float, k: int) -> SweepRow:
    g = make_circle(TWO_PI + theta)
    xi1 = g.point_on_edge(0, 0.0)
    if k == 1:
        eta, margin, _aux = search_regular_direction(g, [xi1])
        return SweepRow(theta, 1, margin, None, _coordinate(g, eta))
    f1 = antipodal_field(g, xi1)
    feasible = (-f1).solve_ge(-PI / 2)  # F1 <= pi/2
    candidates: list[GraphPoint] = []
    for s, lo, hi in feasible:
        for t in (lo, 0.5 * (lo + hi), hi):
            candidates.append(g.seg_point(s, t))
        for bp in f1.fields[s].xs:
            if lo - 1e-12 <= bp <= hi + 1e-12:
                candidates.append(g.seg_point(s, bp))
    if not candidates:
        xi2, val = f1.global_min()
        return SweepRow(theta, 2, PI / 2 - val, _coordinate(g, xi2), None)
    best: Optional[tuple] = None
    seen: set[tuple[int, float]] = set()
    for xi2 in candidates:
        key = (xi2.seg, round(xi2.t, 12))
        if key in seen:
            continue
        seen.add(key)
        f2 = antipodal_field(g, xi2)
        eta, val = f1.maximum(f2).global_min()
        margin = PI / 2 - val
        if best is None or margin > best[0] + 1e-15:
            best = (margin, xi2, eta)
    margin, xi2, eta = best
    return SweepRow(theta, 2, margin, _coordinate(g, xi2), _coordinate(g, eta))


def example14_sweep(theta_grid: Sequence[float], k: int) -> list[SweepRow]:
    """Best joint noncriticality margin on the cone over a circle of
    length 2*pi + theta, per grid point.

    For k = 2 the reported number is the best witness-side margin over
    configurations whose pairwise antipodal distance is held at or below
    pi/2 (the vanishing-delta reading); when no configuration satisfies
    the pairwise constraint the (negative) pairwise margin is reported.
    """
    if k not in (1, 2):
        raise PreconditionError("the sweep covers k in {1, 2}")
    if any(t < 0 or t > 3.5 for t in theta_grid):
        raise PreconditionError("theta grid must stay within [0, 3.5]")
    return ordered_map(lambda t: _sweep_point(t, k), list(theta_grid))


def sweep_csv_rows(rows: Sequence[SweepRow]) -> list[list]:
    out = [["theta", "k", "best_margin", "xi2", "eta"]]
    for r in rows:
        out.append([r.theta, r.k, r.best_margin,
                    "" if r.xi2 is None else r.xi2,
                    "" if r.eta is None else r.eta])
    return out


# ---------------------------------------------------------------------------
# circle-to-sphere comparison map


@dataclass
class SphereMapResult:
    """Normalized two-coordinate comparison map on a circle graph."""

    hypotheses_ok: bool
    hypothesis_report: regularity.MarginReport
    winding: Optional[int] = None
    distortion: Optional[float] = None
    lipschitz: Optional[float] = None
    inverse_lipschitz: Optional[float] = None
    density_margin: Optional[float] = None
    density_slack: Optional[float] = None
    bijective: Optional[bool] = None
    resolution: float = 1e-3
    table: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "hypotheses_ok": self.hypotheses_ok,
            "hypothesis_report": self.hypothesis_report.to_json(),
            "winding": self.winding,
            "distortion": self.distortion,
            "lipschitz": self.lipschitz,
            "inverse_lipschitz": self.inverse_lipschitz,
            "density_margin": self.density_margin,
            "density_slack": self.density_slack,
            "bijective": self.bijective,
            "resolution": self.resolution,
            "table": self.table,
        }


def _cycle_coordinates(g: SphericalGraph) -> tuple[float, dict[int, tuple[float, int]]]:
    """Arclength chart of a cycle graph: segment -> (start, orientation)."""
    if not g.is_cycle_graph():
        raise PreconditionError("the sphere map needs a circle (cycle graph)")
    start_vertex = 0
    chart: dict[int, tuple[float, int]] = {}
    acc = 0.0
    v = start_vertex
    in_seg = -1
    while True:
        nxt = [(s, w, end) for s, w, end in g.adj[v] if s != in_seg]
        s, w, end = nxt[0]
        chart[s] = (acc, 1 if end == 0 else -1)
        acc += g.seg_len[s]
        v, in_seg = w, s
        if v == start_vertex and len(chart) == g.n_segments:
            break
        if len(chart) > g.n_segments:
            raise InternalConsistencyError("cycle traversal failed")
    return acc, chart


def _chart_coord(g: SphericalGraph, chart, p: GraphPoint) -> float:
    start, orient = chart[p.seg]
    return start + (p.t if orient > 0 else g.seg_len[p.seg] - p.t)


def sphere_map(g: SphericalGraph, xis: Sequence[GraphPoint], eta: GraphPoint,
               eps: float, delta: float, resolution: float = 1e-3,
               table_size: int = 33) -> SphereMapResult:
    """Evaluate x -> normalize(-cos d(xi_1, x), -cos d(xi_2, x)) on a
    dense net of a circle graph; report winding number, distortion
    relative to the round circle, and the half-pi density margin of the
    configuration."""
    if len(xis) != 2:
        raise PreconditionError("the one-dimensional sphere map needs exactly two xis")
    if not g.is_cycle_graph():
        raise PreconditionError("the sphere map needs a circle (cycle graph)")
    rep = check_collection(g, Collection(g, list(xis), eta), eps, delta)
    if not rep.verdict:
        return SphereMapResult(False, rep, resolution=resolution)

    total, chart = _cycle_coordinates(g)
    pos = np.array([_chart_coord(g, chart, q) for q in list(xis) + [eta]])
    m = max(int(math.ceil(total / resolution)), 16)
    xs = np.arange(m) * (total / m)

    def dbar(center: float) -> np.ndarray:
        raw = np.abs(xs - center)
        circ = np.minimum(raw, total - raw)
        return np.minimum(circ, PI)

    d1, d2, de = dbar(pos[0]), dbar(pos[1]), dbar(pos[2])
    fx, fy = -np.cos(d1), -np.cos(d2)
    norms = np.hypot(fx, fy)
    if float(norms.min()) < 1e-12:
        raise InternalConsistencyError("comparison map vanished on the net")
    ux, uy = fx / norms, fy / norms

    ang = np.arctan2(uy, ux)
    inc = np.diff(np.concatenate([ang, ang[:1]]))
    inc = (inc + PI) % TWO_PI - PI
    winding_raw = float(inc.sum() / TWO_PI)
    winding = int(round(winding_raw))
    if abs(winding_raw - winding) > 1e-6 or abs(winding) != 1:
        raise InternalConsistencyError(f"winding number {winding_raw} is not +-1")

    step = total / m
    local = np.abs(inc) / step
    lip = float(local.max())
    nonzero = local[local > 1e-15]
    inv_lip = float(1.0 / nonzero.min()) if len(nonzero) == len(local) else math.inf
    stride = max(1, m // 256)
    sub = np.arange(0, m, stride)
    du = ux[sub, None] * ux[None, sub] + uy[sub, None] * uy[None, sub]
    sphere_d = np.arccos(np.clip(du, -1.0, 1.0))
    raw = np.abs(xs[sub, None] - xs[None, sub])
    circ = np.minimum(raw, total - raw)
    base_d = np.minimum(circ, PI)
    mask = base_d > 1e-9
    lip = max(lip, float((sphere_d[mask] / base_d[mask]).max()))
    inv_mask = mask & (sphere_d > 1e-12)
    inv_lip = max(inv_lip, float((base_d[inv_mask] / sphere_d[inv_mask]).max()))
    distortion = max(lip, inv_lip)

    density = float(np.minimum(np.minimum(d1, d2), de).max())
    signs = np.sign(inc)
    bijective = abs(winding) == 1 and (np.all(signs >= 0) or np.all(signs <= 0)) \
        and bool(np.all(np.abs(inc) > 0))

    stride_t = max(1, m // max(table_size - 1, 1))
    table = [{"x": float(xs[j]), "f1": float(ux[j]), "f2": float(uy[j]),
              "local_distortion": float(max(local[j], 1e-300))}
             for j in range(0, m, stride_t)]
    return SphereMapResult(
        True, rep, winding=winding, distortion=distortion, lipschitz=lip,
        inverse_lipschitz=inv_lip, density_margin=density,
        density_slack=density - PI / 2, bijective=bijective,
        resolution=resolution, table=table)


def sphere_map_csv_rows(g: SphericalGraph, xis: Sequence[GraphPoint], eta: GraphPoint,
                        result: SphereMapResult) -> list[list]:
    rows = [["x", "ftilde_1", "ftilde_2", "local_distortion"]]
    for entry in result.table:
        rows.append([entry["x"], entry["f1"], entry["f2"], entry["local_distortion"]])
    return rows
