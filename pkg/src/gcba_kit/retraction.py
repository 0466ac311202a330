"""Fiber retraction for noncritical distance maps on cones.

With f_i = |a_i .| - |a_i p|, the retraction is R2 o R1: R1 pushes a
point along the geodesic toward the witness b until the proportional
super-level set is reached, R2 projects onto the convex common
sub-level set (an intersection of closed balls).  The composition lands
on the fiber through p, is the identity there, and moves points by a
controlled factor L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import cones, regularity
from .cones import ConeSpace, comparison_angle, cone_distance, cone_geodesic
from .errors import (InternalConsistencyError, PreconditionError,
                     RetractionConstantError)
from .spaces import PI, ConePoint

_BISECT_TOL = 1e-10
_FIBER_TOL = 1e-6


def default_constants(c: float) -> tuple[float, float]:
    """Proportionality threshold s and range factor L from the measured
    openness/margin constant c."""
    if not (0.0 < c < 1.0):
        raise PreconditionError("constant c must lie in (0, 1)")
    s = 1.0 / (1.0 + 2.0 / c)
    L = 2.0 / c + 1.0
    return s, L


@dataclass
class FiberSpec:
    """Distance map, base point, and constants driving the retraction."""

    K: ConeSpace
    p: ConePoint
    a_list: list[ConePoint]
    b: ConePoint
    eps: float
    delta: float
    rho: float
    c: float
    s: float = field(init=False)
    L: float = field(init=False)
    radii: list[float] = field(init=False)
    validate: bool = True

    def __post_init__(self):
        if not self.a_list:
            raise PreconditionError("need at least one anchor point")
        self.s, self.L = default_constants(self.c)
        self.radii = [cone_distance(self.K, a, self.p) for a in self.a_list]
        if min(self.radii) <= self.rho:
            raise PreconditionError("every |a_i p| must exceed rho")
        if cone_distance(self.K, self.b, self.p) <= self.rho:
            raise PreconditionError("|b p| must exceed rho")
        if self.validate:
            rep = regularity.check_map_rho(
                self.K, self.p, self.a_list, self.b, self.eps, self.delta,
                self.rho, resolution=max(self.rho / 6.0, 0.02))
            if not rep.verdict:
                raise PreconditionError(
                    f"map is not ({self.eps}, {self.delta}, {self.rho})-noncritical "
                    f"at p: eps_margin={rep.eps_margin}, delta_margin={rep.delta_margin}")

    @property
    def k(self) -> int:
        return len(self.a_list)

    @property
    def max_ball(self) -> float:
        """Radius bound rho*delta for retraction inputs."""
        return self.rho * self.delta

    def f(self, x: ConePoint) -> list[float]:
        return [cone_distance(self.K, a, x) - r
                for a, r in zip(self.a_list, self.radii)]

    def fiber_residual(self, x: ConePoint) -> float:
        return max(abs(v) for v in self.f(x))

    def to_json(self) -> dict:
        return {
            "p": self.K.external_locus(self.p),
            "a_list": [self.K.external_locus(a) for a in self.a_list],
            "b": self.K.external_locus(self.b),
            "eps": self.eps, "delta": self.delta, "rho": self.rho,
            "c": self.c, "s": self.s, "L": self.L,
        }


@dataclass
class PiClassification:
    """Signed membership margins for the two retraction sets."""

    plus_margin: float
    minus_margin: float
    s: float

    @property
    def in_pi_plus(self) -> bool:
        return self.plus_margin >= -1e-12

    @property
    def in_pi_minus(self) -> bool:
        return self.minus_margin <= 1e-12

    @property
    def on_fiber(self) -> bool:
        return self.in_pi_plus and self.in_pi_minus

    def to_json(self) -> dict:
        return {"plus_margin": self.plus_margin, "minus_margin": self.minus_margin,
                "in_pi_plus": self.in_pi_plus, "in_pi_minus": self.in_pi_minus,
                "on_fiber": self.on_fiber, "s": self.s}


def _plus_margin(spec: FiberSpec, values: list[float]) -> float:
    if spec.k == 1:
        return values[0]
    return min(values[i] - spec.s * values[j]
               for i in range(spec.k) for j in range(spec.k) if i != j)


def classify(spec: FiberSpec, x: ConePoint) -> PiClassification:
    values = spec.f(x)
    return PiClassification(_plus_margin(spec, values), max(values), spec.s)


# ---------------------------------------------------------------------------
# R1: advance toward the witness until the super-level set


def r1(spec: FiberSpec, x: ConePoint, r: Optional[float] = None) -> ConePoint:
    """First point on the geodesic from x to b lying in the proportional
    super-level set; identity when x is already inside."""
    margin0 = _plus_margin(spec, spec.f(x))
    if margin0 >= -1e-12:
        return x
    geo = cone_geodesic(spec.K, x, spec.b)

    def margin(t: float) -> float:
        return _plus_margin(spec, spec.f(geo.point_at(t)))

    t_hi = min(geo.length, max(1e-6, -margin0 / max(spec.c, 1e-9)))
    while margin(t_hi) < 0.0:
        if t_hi >= geo.length - 1e-15:
            raise RetractionConstantError(
                "super-level set not reached before b; the constant c is too "
                "large for this configuration, lower it")
        t_hi = min(geo.length, 2.0 * t_hi)
    t_lo = 0.0
    while t_hi - t_lo > _BISECT_TOL:
        mid = 0.5 * (t_lo + t_hi)
        if margin(mid) >= 0.0:
            t_hi = mid
        else:
            t_lo = mid
    travel = t_hi
    budget = r if r is not None else cone_distance(spec.K, spec.p, x)
    if travel > 2.0 * budget / spec.c + 1e-9:
        raise RetractionConstantError(
            f"travel {travel} exceeds 2r/c = {2.0 * budget / spec.c}; "
            "the constant c overstates the available margin")
    return geo.point_at(t_hi)


# ---------------------------------------------------------------------------
# R2: nearest point on the common sub-level set


def _project_ball(spec: FiberSpec, y: ConePoint, i: int) -> ConePoint:
    geo = cone_geodesic(spec.K, y, spec.a_list[i])
    return geo.point_at(geo.length - spec.radii[i])


def _first_order_ok(spec: FiberSpec, x: ConePoint, y: ConePoint,
                    tol: float = 1e-4) -> bool:
    dxy = cone_distance(spec.K, x, y)
    dpy = cone_distance(spec.K, spec.p, y)
    if dxy <= 1e-9 or dpy <= 1e-9:
        return True
    dpx = cone_distance(spec.K, spec.p, x)
    return comparison_angle(dpy, dxy, dpx) >= PI / 2 - tol


def r2(spec: FiberSpec, x: ConePoint) -> ConePoint:
    """Nearest point of the intersection of the closed balls around the
    anchors; cyclic projection with a first-order optimality check."""
    values = spec.f(x)
    if max(values) <= 1e-12:
        return x
    if spec.k == 1:
        y = _project_ball(spec, x, 0)
    else:
        y = x
        for _ in range(500):
            worst = max(spec.f(y))
            if worst <= 1e-11:
                break
            for i in range(spec.k):
                if spec.f(y)[i] > 0.0:
                    y = _project_ball(spec, y, i)
        else:
            raise InternalConsistencyError("cyclic ball projection did not converge")
        y = _refine_projection(spec, x, y)
    if not _first_order_ok(spec, x, y):
        raise InternalConsistencyError(
            "projection onto the sub-level set failed the first-order check")
    return y


def _refine_projection(spec: FiberSpec, x: ConePoint, y: ConePoint) -> ConePoint:
    """Local improvement of the projected point along the boundary."""
    step = max(cone_distance(spec.K, x, y) * 0.25, 1e-7)
    best = y
    best_d = cone_distance(spec.K, x, y)
    for _ in range(60):
        improved = False
        for cand in cones.perturbations(spec.K, best, step):
            # pull the candidate back into the feasible set
            z = cand
            for _ in range(50):
                vals = spec.f(z)
                if max(vals) <= 1e-11:
                    break
                z = _project_ball(spec, z, max(range(spec.k), key=lambda i: vals[i]))
            d = cone_distance(spec.K, x, z)
            if d < best_d - 1e-13:
                best, best_d = z, d
                improved = True
        if not improved:
            step *= 0.5
            if step < 1e-10:
                break
    return best


# ---------------------------------------------------------------------------
# the retraction and its derived constructions


def retract(spec: FiberSpec, x: ConePoint, r: Optional[float] = None) -> ConePoint:
    """R2(R1(x)) with fiber-residual and range postconditions enforced."""
    y = r2(spec, r1(spec, x, r))
    res = spec.fiber_residual(y)
    if res > _FIBER_TOL:
        raise InternalConsistencyError(f"retraction left fiber residual {res}")
    if r is not None:
        reach = cone_distance(spec.K, spec.p, y)
        if reach > spec.L * r + _FIBER_TOL:
            raise InternalConsistencyError(
                f"retraction range {reach} exceeds L*r = {spec.L * r}")
    return y


def sample_fiber(spec: FiberSpec, r: float, n: int) -> list[ConePoint]:
    """Fiber points in B(p, r) obtained by retracting a deterministic
    r-net of the ball; at least one output witnesses non-degeneracy at
    scale r/(2L)."""
    dim_tp = 2  # direction spaces of these cone models are one-dimensional
    if spec.k >= dim_tp:
        raise PreconditionError(
            "fiber sampling needs k < dim T_p; the fiber is locally a point")
    if r >= spec.max_ball:
        raise PreconditionError(
            f"net radius r = {r} must stay below rho*delta = {spec.max_ball}")
    net = regularity._ball_net(spec.K, spec.p, r * 0.999, r / 8.0)
    outputs: list[ConePoint] = [retract(spec, spec.p)]
    for x in net:
        y = retract(spec, x, r=r)
        if cone_distance(spec.K, spec.p, y) <= r + 1e-9:
            outputs.append(y)
    quant = max(1e-7, r * 1e-4)
    buckets: dict[tuple, ConePoint] = {}
    for y in sorted(outputs, key=ConePoint.sort_key):
        if y.is_apex:
            key = (-1, 0, 0)
        else:
            key = (y.base.seg, round(y.base.t / quant), round(y.r / quant))
        buckets.setdefault(key, y)
    distinct = sorted(buckets.values(), key=ConePoint.sort_key)
    far = max(distinct, key=lambda y: cone_distance(spec.K, spec.p, y))
    if cone_distance(spec.K, spec.p, far) < r / (2.0 * spec.L):
        raise InternalConsistencyError(
            "fiber sampling found no point at scale r/(2L); the fiber looks "
            "degenerate, contradicting k < dim T_p")
    if len(distinct) < n:
        raise InternalConsistencyError(
            f"only {len(distinct)} distinct fiber points found, {n} requested")
    # incremental farthest-point selection keeps the sample spread out
    chosen = [far]
    dist_to_chosen = [cone_distance(spec.K, y, far) for y in distinct]
    while len(chosen) < n:
        idx = max(range(len(distinct)),
                  key=lambda i: (dist_to_chosen[i],
                                 tuple(-v for v in distinct[i].sort_key())))
        if dist_to_chosen[idx] <= 0.0:
            break
        y = distinct[idx]
        chosen.append(y)
        for i, z in enumerate(distinct):
            d = cone_distance(spec.K, z, y)
            if d < dist_to_chosen[i]:
                dist_to_chosen[i] = d
    return sorted(chosen, key=ConePoint.sort_key)


@dataclass
class HomotopyTrace:
    """Discrete contraction of one fiber point to p along the fiber."""

    point_id: int
    entries: list[tuple[float, ConePoint, float]]


@dataclass
class ContractionResult:
    spec: FiberSpec
    r: float
    traces: list[HomotopyTrace]

    @property
    def max_residual(self) -> float:
        return max(res for tr in self.traces for _t, _y, res in tr.entries)

    @property
    def max_reach(self) -> float:
        return max(cone_distance(self.spec.K, self.spec.p, y)
                   for tr in self.traces for _t, y, _res in tr.entries)

    def csv_rows(self) -> list[list]:
        rows = [["point", "t", "edge", "offset", "radius", "residual"]]
        for tr in self.traces:
            for t, y, res in tr.entries:
                locus = self.spec.K.external_locus(y)
                rows.append([tr.point_id, t, locus.get("edge", ""),
                             locus.get("offset", ""), y.r, res])
        return rows

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "max_residual": self.max_residual,
            "max_reach": self.max_reach,
            "points": len(self.traces),
            "traces": [{
                "point": tr.point_id,
                "steps": [{"t": t, "locus": self.spec.K.external_locus(y),
                           "residual": res} for t, y, res in tr.entries],
            } for tr in self.traces],
        }


def contract_fiber_ball(spec: FiberSpec, r: float, n_points: int = 8,
                        steps: int = 10) -> ContractionResult:
    """Discrete null-homotopy of the fiber ball: each sampled fiber point
    flows to p through retract(interpolate(x -> p, t)); every trace stays
    on the fiber and inside B(p, L*r)."""
    pts = sample_fiber(spec, r, n_points)
    traces = []
    for idx, x in enumerate(pts):
        geo = cone_geodesic(spec.K, x, spec.p)
        entries = []
        for j in range(steps + 1):
            t = j / steps
            z = geo.point_at(t * geo.length)
            y = retract(spec, z, r=r)
            res = spec.fiber_residual(y)
            reach = cone_distance(spec.K, spec.p, y)
            if reach > spec.L * r + _FIBER_TOL:
                raise InternalConsistencyError(
                    f"homotopy trace left B(p, L*r): {reach} > {spec.L * r}")
            entries.append((t, y, res))
        traces.append(HomotopyTrace(idx, entries))
    return ContractionResult(spec, r, traces)
