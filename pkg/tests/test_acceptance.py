"""Acceptance suite: one criterion per test, each printing a pass/fail
line with the measured values, asserted at the stated tolerances."""

import itertools
import math
import random
import time

import numpy as np

from gcba_kit import analysis as A
from gcba_kit import cones as C
from gcba_kit import geodesy as G
from gcba_kit import regularity as R
from gcba_kit import retraction as RT
from gcba_kit.spaces import ConeSpace, apex, cone_point, make_circle, make_suspension

from util import (PI, TWO_PI, plane_cone, plane_point, plane_xy, random_point,
                  random_spherical_graph)

PLANE = plane_cone()


def report(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def plane_fiber_spec():
    return RT.FiberSpec(PLANE, apex(), [plane_point(PLANE, 3.0, 0.0)],
                        plane_point(PLANE, -2.0, 0.0),
                        eps=0.5, delta=0.35, rho=1.9, c=0.9)


# ---------------------------------------------------------------------------


def test_criterion_1_example_thresholds():
    """Feasibility boundary location on the cone-angle sweep."""
    t0 = time.monotonic()

    def boundary(rows):
        flips = []
        for a, b in zip(rows, rows[1:]):
            if (a.best_margin > 0) != (b.best_margin > 0):
                flips.append(0.5 * (a.theta + b.theta))
        return flips

    grid2 = [round(0.01 * i, 10) for i in range(121)]
    flips2 = boundary(A.example14_sweep(grid2, 2))
    grid1 = [round(0.01 * i, 10) for i in range(351)]
    flips1 = boundary(A.example14_sweep(grid1, 1))
    elapsed = time.monotonic() - t0

    ok2 = len(flips2) == 1 and abs(flips2[0] - PI / 4) <= 0.02
    ok1 = len(flips1) == 1 and abs(flips1[0] - PI) <= 0.02
    report("criterion 1: sweep thresholds",
           ok2 and ok1 and elapsed < 60.0,
           f"k=2 boundary {flips2[0]:.4f} vs pi/4 = {PI/4:.4f}, "
           f"k=1 boundary {flips1[0]:.4f} vs pi = {PI:.4f}, {elapsed:.1f} s")


def test_criterion_2_antipodal_duality():
    """Method gap of the two antipodal-distance formulas."""
    t0 = time.monotonic()
    rng = random.Random(42)
    spaces = [make_circle(TWO_PI), make_circle(TWO_PI + 0.5),
              make_suspension(3), make_suspension(5)]
    spaces += [random_spherical_graph(rng) for _ in range(20)]
    worst = 0.0
    n = 0
    for g in spaces:
        rr = random.Random(7)
        for _ in range(1000):
            xi, eta = random_point(g, rr), random_point(g, rr)
            _v, gap = G.antipodal_distance(g, xi, eta)
            worst = max(worst, gap)
            n += 1
    elapsed = time.monotonic() - t0
    report("criterion 2: antipodal duality",
           worst <= 1e-9 and elapsed < 10.0,
           f"{n} pairs on {len(spaces)} spaces, worst gap {worst:.2e}, {elapsed:.1f} s")


def test_criterion_3_plane_oracle():
    """Cone over the round circle against Euclidean closed forms."""
    t0 = time.monotonic()
    rng = np.random.default_rng(11)

    worst_d = 0.0
    worst_mid = 0.0
    for _ in range(10_000):
        x1, y1, x2, y2 = rng.random(4) * 6.0 - 3.0
        u = plane_point(PLANE, x1, y1)
        v = plane_point(PLANE, x2, y2)
        d = C.cone_distance(PLANE, u, v)
        worst_d = max(worst_d, abs(d - math.hypot(x1 - x2, y1 - y2)))
    for _ in range(1000):
        x1, y1, x2, y2 = rng.random(4) * 6.0 - 3.0
        u = plane_point(PLANE, x1, y1)
        v = plane_point(PLANE, x2, y2)
        geo = C.cone_geodesic(PLANE, u, v)
        lam = float(rng.random())
        mx, my = plane_xy(PLANE, geo.point_at(lam * geo.length))
        ex, ey = x1 + lam * (x2 - x1), y1 + lam * (y2 - y1)
        worst_mid = max(worst_mid, math.hypot(mx - ex, my - ey))

    # closed-form planar retraction (k = 1)
    from test_retraction import closed_form_retract

    spec = plane_fiber_spec()
    worst_r = 0.0
    for _ in range(1000):
        x, y = rng.random(2) * 1.0 - 0.5
        out = RT.retract(spec, plane_point(PLANE, x, y), r=0.75)
        ox, oy = plane_xy(PLANE, out)
        ex, ey = closed_form_retract(x, y)
        worst_r = max(worst_r, math.hypot(ox - ex, oy - ey))
    elapsed = time.monotonic() - t0
    report("criterion 3: plane oracle",
           worst_d <= 1e-9 and worst_mid <= 1e-9 and worst_r <= 1e-8
           and elapsed < 10.0,
           f"distance {worst_d:.2e}, geodesic {worst_mid:.2e}, "
           f"retraction {worst_r:.2e}, {elapsed:.1f} s")


def _gen_k1(rng):
    while True:
        g = random_spherical_graph(rng)
        xi1 = random_point(g, rng)
        eta, margin, _ = R.search_regular_direction(g, [xi1])
        if margin >= 0.05:
            return g, [xi1], eta


def _gen_k2(rng):
    attempts = 0
    while True:
        attempts += 1
        if attempts % 8 == 0:
            g = make_circle(TWO_PI + rng.random() * 0.5)
        else:
            g = random_spherical_graph(rng)
        xi1 = random_point(g, rng)
        f1 = G.antipodal_field(g, xi1)
        comps = (-f1).solve_ge(-(PI / 2 - 0.05))  # antipodal(xi1, .) <= pi/2 - 0.05
        cands = []
        for s, lo, hi in comps:
            for t in (lo, 0.5 * (lo + hi), hi):
                cands.append(g.seg_point(s, t))
        rng.shuffle(cands)
        for xi2 in cands[:4]:
            if G.points_equal(xi1, xi2):
                continue
            eta, margin, _ = R.search_regular_direction(g, [xi1, xi2])
            if margin >= 0.05 and R.model_antipodal(g, xi1, xi2)[0] <= PI / 2 - 0.05:
                return g, [xi1, xi2], eta


def test_criterion_4_orthogonality_witness():
    """find_v postconditions on randomized noncritical collections and
    the absence of over-dimensional collections."""
    t0 = time.monotonic()
    rng = random.Random(2024)
    worst_eq = 0.0
    worst_m1 = math.inf
    worst_m2 = math.inf
    for i in range(100):
        g, xis, eta = _gen_k1(rng) if i < 50 else _gen_k2(rng)
        v, m = R.find_v(g, R.Collection(g, xis, eta), 0.04, 0.04)
        worst_eq = max(worst_eq, m["eq_residual"])
        worst_m1 = min(worst_m1, m["m1"])
        worst_m2 = min(worst_m2, m["m2"])

    spaces = [make_circle(TWO_PI), make_circle(TWO_PI + 0.5)] + \
        [random_spherical_graph(rng) for _ in range(6)]
    tried = 0
    found_triple = False
    for g in spaces:
        for _ in range(40):
            xis = [random_point(g, rng) for _ in range(3)]
            if any(G.points_equal(a, b) for a, b in itertools.combinations(xis, 2)):
                continue
            pair = max(R.model_antipodal(g, a, b)[0]
                       for a, b in itertools.combinations(xis, 2))
            _eta, margin, _ = R.search_regular_direction(g, xis)
            tried += 1
            if pair < PI / 2 + 0.01 and margin > 0.05:
                found_triple = True
    elapsed = time.monotonic() - t0
    report("criterion 4: orthogonality witness",
           worst_eq <= 1e-9 and worst_m1 >= 0.01 and worst_m2 >= 0.01
           and not found_triple and elapsed < 30.0,
           f"100 collections: eq residual {worst_eq:.2e}, margins >= "
           f"({worst_m1:.3f}, {worst_m2:.3f}); {tried} triples all fail; "
           f"{elapsed:.1f} s")


def _off_apex_spec():
    K = ConeSpace(make_circle(TWO_PI + 0.5))
    base = K.base.point_on_edge(0, 1.0)
    p = cone_point(base, 1.2)
    a1 = cone_point(K.base.point_on_edge(0, 1.0), 2.8)
    b = cone_point(K.base.point_on_edge(0, 1.0), 0.3)
    return RT.FiberSpec(K, p, [a1], b, eps=0.3, delta=0.2, rho=0.6, c=0.5)


def _apex_theta_spec():
    K = ConeSpace(make_circle(TWO_PI + 0.5))
    a1 = cone_point(K.base.point_on_edge(0, 0.0), 1.0)
    b = cone_point(K.base.point_on_edge(0, 4.45), 1.0)
    return RT.FiberSpec(K, apex(), [a1], b, eps=0.2, delta=0.2, rho=0.6, c=0.5)


def _fiber_points_plane(spec, r, n):
    out = []
    for phi in np.linspace(-0.19, 0.19, n):
        x = plane_point(PLANE, 3.0 - 3.0 * math.cos(phi), 3.0 * math.sin(phi))
        if C.cone_distance(spec.K, spec.p, x) < r:
            out.append(x)
    return out


def _fiber_points_apex(spec, r, n):
    """Points of the fiber d(a1, .) = 1 inside B(apex, r): the fiber
    circle passes through the apex, and its non-apex points have radius
    rr = 2 cos(d_base), so small radii need base offsets near pi/2."""
    g = spec.K.base
    out = []
    hi = math.acos(1e-4 / 2.0)
    lo = math.acos(min(r * 0.98, 1.9) / 2.0)
    for dw in np.linspace(lo, hi, n):
        rr = 2.0 * math.cos(dw)
        for w in (dw, -dw % g.total_length):
            x = cone_point(g.point_on_edge(0, w), rr)
            if C.cone_distance(spec.K, spec.p, x) < r:
                out.append(x)
    return out


def _fiber_points_off_apex(spec, r, n):
    g = spec.K.base
    out = []
    for dw in np.linspace(-0.08, 0.08, n):
        disc = 1.6 ** 2 - (2.8 * math.sin(dw)) ** 2
        rr = 2.8 * math.cos(dw) - math.sqrt(disc)
        x = cone_point(g.point_on_edge(0, (1.0 + dw) % g.total_length), rr)
        if C.cone_distance(spec.K, spec.p, x) < r:
            out.append(x)
    return out


def test_criterion_5_retraction_contracts():
    """Retraction postconditions and fiber-ball contraction on three
    cone configurations."""
    t0 = time.monotonic()
    rng = np.random.default_rng(31)
    configs = [
        ("plane k=1", plane_fiber_spec(), 0.6, _fiber_points_plane),
        ("apex theta=0.5 k=1", _apex_theta_spec(), 0.1, _fiber_points_apex),
        ("off-apex k=1", _off_apex_spec(), 0.1, _fiber_points_off_apex),
    ]
    worst = {"residual": 0.0, "identity": 0.0, "range": 0.0, "monotone": 0.0,
             "trace": 0.0}
    for _name, spec, r, fiber_gen in configs:
        K = spec.K
        g = K.base
        lo = max(spec.p.r - r, 0.0)
        done = 0
        while done < 60:
            s = int(rng.integers(0, g.n_segments))
            t = float(rng.random()) * g.seg_len[s]
            rad = lo + float(rng.random()) * (spec.p.r + r - lo)
            if rad <= 1e-6:
                continue
            x = cone_point(g.seg_point(s, t), rad)
            if C.cone_distance(K, spec.p, x) >= r:
                continue
            done += 1
            y = RT.retract(spec, x, r=r)
            worst["residual"] = max(worst["residual"], spec.fiber_residual(y))
            worst["range"] = max(worst["range"],
                                 C.cone_distance(K, spec.p, y) - spec.L * r)
            if RT.classify(spec, x).in_pi_plus:
                y2 = RT.r2(spec, x)
                worst["monotone"] = max(
                    worst["monotone"],
                    C.cone_distance(K, spec.p, y2) - C.cone_distance(K, spec.p, x))
        fiber_pts = fiber_gen(spec, r, 12)
        assert len(fiber_pts) >= 6, f"{_name}: too few on-fiber test points"
        for xf in fiber_pts:
            assert spec.fiber_residual(xf) <= 1e-9
            yf = RT.retract(spec, xf, r=r)
            worst["identity"] = max(worst["identity"], C.cone_distance(K, xf, yf))
        res = RT.contract_fiber_ball(spec, r * 0.8, n_points=5, steps=8)
        worst["trace"] = max(worst["trace"], res.max_residual)
        assert res.max_reach <= spec.L * r * 0.8 + 1e-6
    elapsed = time.monotonic() - t0
    report("criterion 5: retraction and contraction",
           worst["residual"] <= 1e-6 and worst["identity"] <= 1e-9
           and worst["range"] <= 1e-6 and worst["monotone"] <= 1e-6
           and worst["trace"] <= 1e-6 and elapsed < 30.0,
           f"residual {worst['residual']:.2e}, identity {worst['identity']:.2e}, "
           f"range excess {worst['range']:.2e}, r2 monotone {worst['monotone']:.2e}, "
           f"trace {worst['trace']:.2e}, {elapsed:.1f} s")


def test_criterion_6_openness_bilipschitz():
    """Empirical openness and injectivity for the full-rank apex map."""
    t0 = time.monotonic()
    K = ConeSpace(make_circle(TWO_PI + 0.5))
    a_list = [cone_point(K.base.point_on_edge(0, 0.0), 1.0),
              cone_point(K.base.point_on_edge(0, 2.2), 1.0)]
    b = cone_point(K.base.point_on_edge(0, 4.45), 1.0)
    rep = A.openness_estimate(K, apex(), a_list, b, 0.15, 0.3, [0.1, 0.05],
                              n_samples=4, n_targets=12, seed=7,
                              verify_targets=250, injectivity_pairs=10_000)
    elapsed = time.monotonic() - t0
    ver = rep.verification
    inj = rep.injectivity
    report("criterion 6: openness and bi-Lipschitz",
           rep.c_emp > 0 and ver["failures"] == 0 and ver["targets"] >= 1000
           and inj["pairs"] >= 9000 and inj["injective"] and elapsed < 60.0,
           f"c_emp {rep.c_emp:.3f}, {ver['targets']} targets at c_emp/2 with "
           f"{ver['failures']} failures, injective on {inj['pairs']} pairs "
           f"(ratios {inj['min_ratio']:.3f}..{inj['max_ratio']:.3f}), {elapsed:.1f} s")


def test_criterion_7_fiber_sphere_margins():
    """Extended-map noncriticality margins shrink with the sphere radius."""
    t0 = time.monotonic()
    spec = plane_fiber_spec()
    rows = A.fiber_sphere_check(spec, [0.4, 0.2, 0.1, 0.05, 0.025], n=10)
    deltas = [row["delta_margin"] for row in rows]
    decreasing = all(b < a for a, b in zip(deltas, deltas[1:]))
    positive = all(d > 0 for d in deltas)
    witness = A.extended_margins_at(
        spec, plane_point(PLANE, 0.02065353040815784, 0.3514180052883753))
    elapsed = time.monotonic() - t0
    report("criterion 7: fiber-sphere margins",
           positive and decreasing and abs(witness["delta_margin"] - 0.059) <= 0.005
           and elapsed < 10.0,
           f"delta(r) = {', '.join(f'{d:.4f}' for d in deltas)}; "
           f"witness delta({witness['r']:.3f}) = {witness['delta_margin']:.4f}, "
           f"{elapsed:.1f} s")


def test_criterion_8_sphere_map():
    """Distortion, winding, and density of the comparison map."""
    t0 = time.monotonic()
    g0 = make_circle(TWO_PI)
    res0 = A.sphere_map(g0, [g0.point_on_edge(0, 0.0), g0.point_on_edge(0, PI / 2)],
                        g0.point_on_edge(0, 5 * PI / 4), 0.7, 0.01)
    g5 = make_circle(TWO_PI + 0.5)
    res5 = A.sphere_map(g5, [g5.point_on_edge(0, 0.0), g5.point_on_edge(0, 2.2)],
                        g5.point_on_edge(0, 4.45), 0.15, 0.2)
    elapsed = time.monotonic() - t0
    ok0 = res0.hypotheses_ok and abs(res0.winding) == 1 \
        and abs(res0.distortion - 1.0) <= 1e-6
    ok5 = res5.hypotheses_ok and res5.bijective and abs(res5.winding) == 1 \
        and math.isfinite(res5.distortion) \
        and res5.density_margin <= PI / 2 + 0.3
    report("criterion 8: sphere map",
           ok0 and ok5 and elapsed < 10.0,
           f"round distortion {res0.distortion:.8f} winding {res0.winding}; "
           f"theta=0.5 distortion {res5.distortion:.3f} winding {res5.winding} "
           f"density {res5.density_margin:.3f}, {elapsed:.1f} s")
