"""Cone metric, geodesics, direction models, and comparison angles."""

import math
import random

import numpy as np
import pytest

from gcba_kit import cones as C
from gcba_kit import geodesy as G
from gcba_kit.errors import PreconditionError
from gcba_kit.spaces import ConeSpace, apex, cone_point, make_circle, make_suspension

from util import PI, TWO_PI, plane_cone, plane_point, plane_xy

PLANE = plane_cone()
K5 = ConeSpace(make_circle(TWO_PI + 0.5))
KS = ConeSpace(make_suspension(3))


def kp(K, off, r):
    return cone_point(K.base.point_on_edge(0, off), r) if r > 0 else apex()


def test_cone_distance_examples():
    v = cone_point(PLANE.base.point_on_edge(0, 1.0), 2.5)
    assert C.cone_distance(PLANE, apex(), v) == pytest.approx(2.5)
    u = kp(PLANE, 0.0, 1.0)
    w = kp(PLANE, PI / 2, 1.0)
    assert C.cone_distance(PLANE, u, w) == pytest.approx(math.sqrt(2.0))
    # base separation >= pi: through-apex distance s + t
    a = cone_point(KS.base.vertex_point(0), 1.0)
    b = cone_point(KS.base.vertex_point(1), 2.0)
    assert G.distance(KS.base, a.base, b.base, truncated=False) >= PI
    assert C.cone_distance(KS, a, b) == pytest.approx(3.0)


def test_plane_oracle_distance():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(3000):
        x1, y1, x2, y2 = (rng.random(4) - 0.5) * 6
        u = plane_point(PLANE, x1, y1)
        v = plane_point(PLANE, x2, y2)
        d = C.cone_distance(PLANE, u, v)
        worst = max(worst, abs(d - math.hypot(x1 - x2, y1 - y2)))
    assert worst <= 1e-9


def test_plane_oracle_geodesic_midpoints():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(400):
        x1, y1, x2, y2 = (rng.random(4) - 0.5) * 6
        u = plane_point(PLANE, x1, y1)
        v = plane_point(PLANE, x2, y2)
        geo = C.cone_geodesic(PLANE, u, v)
        mx, my = plane_xy(PLANE, geo.point_at(geo.length / 2))
        worst = max(worst, math.hypot(mx - (x1 + x2) / 2, my - (y1 + y2) / 2))
    assert worst <= 1e-9


def test_chord_min_radius():
    geo = C.cone_geodesic(PLANE, kp(PLANE, 0.0, 1.0), kp(PLANE, PI / 2, 1.0))
    assert geo.min_radius() == pytest.approx(math.sqrt(2) / 2)


def test_through_apex_path():
    a = cone_point(KS.base.vertex_point(0), 1.0)
    b = cone_point(KS.base.vertex_point(1), 2.0)
    geo = C.cone_geodesic(KS, a, b)
    assert geo.kind == "apex" and geo.length == pytest.approx(3.0)
    assert geo.point_at(1.0).is_apex
    assert geo.point_at(0.4).r == pytest.approx(0.6)
    assert geo.point_at(2.0).r == pytest.approx(1.0)


def test_crossings_count_development():
    # base path passing one internal vertex develops with one ray crossing
    g = K5.base
    u = cone_point(g.vertex_point(1), 1.0)  # internal subdivision vertex
    v_base = g.seg_point(2, 0.5)
    assert G.distance(g, u.base, v_base, truncated=False) < PI
    v = cone_point(v_base, 1.3)
    geo = C.cone_geodesic(K5, u, v)
    inner = geo.crossings()[1:-1]
    assert len(inner) == len(geo.base_path.steps) - 1 == 1
    # crossing point sits on the intermediate vertex ray
    _tau, cp = inner[0]
    assert cp.base.vertex is not None


def test_radial_geodesic():
    u = kp(PLANE, 1.0, 0.5)
    v = kp(PLANE, 1.0, 2.0)
    geo = C.cone_geodesic(PLANE, u, v)
    assert geo.kind == "radial" and geo.length == pytest.approx(1.5)
    assert geo.point_at(0.7).r == pytest.approx(1.2)


def test_space_of_directions_variants():
    m = C.space_of_directions(K5, apex())
    assert m.variant == "base_graph" and m.space is K5.base
    m = C.space_of_directions(PLANE, kp(PLANE, 1.0, 1.0))
    assert m.variant == "circle_2pi"
    assert m.space.total_length == pytest.approx(TWO_PI)
    over_vertex = cone_point(KS.base.vertex_point(0), 1.0)
    m = C.space_of_directions(KS, over_vertex)
    assert m.variant == "suspension_3" and m.space.n_segments == 3


def test_direction_at_examples():
    # radial from the apex: the direction is the base point itself
    a = kp(K5, 2.2, 1.0)
    d = C.direction_at(K5, apex(), a)
    assert len(d) == 1
    assert K5.base.external_locus(d[0].point)["offset"] == pytest.approx(2.2)

    # plane: p=(1,0), a=(0,1): angle between p->a and p->apex is pi/4
    p = plane_point(PLANE, 1.0, 0.0)
    a = plane_point(PLANE, 0.0, 1.0)
    ang = C.angle_between(PLANE, p, a, apex())
    assert ang == pytest.approx(PI / 4, abs=1e-12)

    # base separation >= pi: the inward pole
    u = kp(KS, 0.3, 1.0)
    far = cone_point(KS.base.point_on_edge(1, PI - 0.3 + 0.2), 1.0)
    if G.distance(KS.base, u.base, far.base, truncated=False) >= PI:
        d = C.direction_at(KS, u, far)
        assert d[0].angle == pytest.approx(PI)

    with pytest.raises(PreconditionError):
        C.direction_at(PLANE, p, p)


def test_comparison_angle():
    assert C.comparison_angle(1, 1, math.sqrt(2)) == pytest.approx(PI / 2)
    assert C.comparison_angle(1, 1, 2) == pytest.approx(PI)
    assert C.comparison_angle(PI / 2, PI / 2, PI / 2, "spherical") == pytest.approx(PI / 2)
    with pytest.raises(PreconditionError):
        C.comparison_angle(0.0, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        C.comparison_angle(1.0, 1.0, 2.5)
    with pytest.raises(PreconditionError):
        C.comparison_angle(2.5, 2.5, 2.5, "spherical")  # perimeter > 2*pi
    with pytest.raises(PreconditionError):
        C.comparison_angle(3.2, 1.0, 2.5, "spherical")  # side > pi


def test_first_variation():
    """(f o gamma)'(tau) = -cos angle(direction to a, forward direction),
    by symmetric finite differences at an interior parameter."""
    rng = random.Random(7)
    checked = 0
    worst = 0.0
    cones_cycle = (PLANE, K5, KS)
    attempts = 0
    while checked < 1000 and attempts < 100_000:
        attempts += 1
        K = cones_cycle[attempts % 3]
        g = K.base
        if True:
            s1, s2, s3 = (rng.randrange(g.n_segments) for _ in range(3))
            a = cone_point(g.seg_point(s1, rng.random() * g.seg_len[s1]),
                           0.3 + 2.5 * rng.random())
            p = cone_point(g.seg_point(s2, rng.random() * g.seg_len[s2]),
                           0.3 + 2.5 * rng.random())
            q = cone_point(g.seg_point(s3, rng.random() * g.seg_len[s3]),
                           0.3 + 2.5 * rng.random())
            if C.cone_distance(K, p, q) < 0.2 or C.cone_distance(K, p, a) < 0.2:
                continue
            geo = C.cone_geodesic(K, p, q)
            tau = 0.5 * geo.length
            z = geo.point_at(tau)
            if z.is_apex or z.r < 0.05:
                continue
            # first variation needs a unique direction toward a
            dz = C.cone_distance(K, z, a)
            if dz < 0.1:
                continue
            base_sep = G.distance(g, z.base, a.base, truncated=False) if not a.is_apex else 0.0
            if not (0.05 < base_sep < PI - 0.05):
                continue
            model = C.space_of_directions(K, z)
            to_a = C.direction_at(K, z, a, model)[0].point
            fwd = C.direction_at(K, z, q, model)[0].point if C.cone_distance(K, z, q) > 0.1 else None
            if fwd is None:
                continue
            ang = model.distance(to_a, fwd)
            h = 1e-4
            fd = (C.cone_distance(K, a, geo.point_at(tau + h))
                  - C.cone_distance(K, a, geo.point_at(tau - h))) / (2 * h)
            worst = max(worst, abs(fd - (-math.cos(ang))))
            checked += 1
    assert checked >= 1000
    assert worst <= 1e-6


def test_triangle_comparison_and_angle_sum():
    rng = random.Random(11)
    for K in (PLANE, K5):
        g = K.base
        for _ in range(300):
            pts = []
            for _i in range(3):
                s = rng.randrange(g.n_segments)
                pts.append(cone_point(g.seg_point(s, rng.random() * g.seg_len[s]),
                                      0.2 + 2.0 * rng.random()))
            a, x, y = pts
            dxy = C.cone_distance(K, x, y)
            dax = C.cone_distance(K, a, x)
            day = C.cone_distance(K, a, y)
            if min(dxy, dax, day) < 0.05:
                continue
            # CAT(0): the angle is at most the comparison angle
            ang = C.angle_between(K, x, a, y)
            assert ang <= C.comparison_angle(dax, dxy, day) + 1e-9
            # the two base comparison angles of a triangle sum to <= pi
            s1 = C.comparison_angle(dax, dxy, day)
            s2 = C.comparison_angle(day, dxy, dax)
            assert s1 + s2 <= PI + 1e-9


def test_four_point_worst_violation():
    assert C.four_point_check(K5, 4000, 1) <= 1e-9
    assert C.four_point_check(KS, 4000, 2) <= 1e-9
