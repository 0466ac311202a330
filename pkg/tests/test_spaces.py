"""Model-space construction, validation, and the shared JSON vocabulary."""

import math

import networkx as nx
import pytest

from gcba_kit.errors import ParseError, SpaceValidationError
from gcba_kit.spaces import (
    ConeSpace,
    SphericalGraph,
    TinyBallSpec,
    apex,
    build_space,
    make_circle,
    make_space,
    make_suspension,
    validate_space,
)
from gcba_kit import geodesy

from util import PI, TWO_PI, random_spherical_graph
import random


def cycle_lengths_oracle(g: SphericalGraph) -> list[float]:
    """Independent cycle enumeration: parallel-segment pairs plus simple
    vertex cycles over the min-weight simple graph (enough for girth)."""
    from itertools import combinations

    lengths: list[float] = []
    by_pair: dict[tuple[int, int], list[float]] = {}
    for s in range(g.n_segments):
        key = tuple(sorted((g.seg_u[s], g.seg_v[s])))
        by_pair.setdefault(key, []).append(g.seg_len[s])
    for ls in by_pair.values():
        for l1, l2 in combinations(sorted(ls), 2):
            lengths.append(l1 + l2)
    G = nx.Graph()
    for (a, b), ls in by_pair.items():
        G.add_edge(a, b, weight=min(ls))
    for cyc in nx.simple_cycles(G):
        if len(cyc) < 3:
            continue
        lengths.append(sum(G[a][b]["weight"]
                           for a, b in zip(cyc, cyc[1:] + cyc[:1])))
    return lengths


def girth_oracle(g: SphericalGraph) -> float:
    lengths = cycle_lengths_oracle(g)
    return min(lengths) if lengths else math.inf


def test_circle_round():
    g = make_space({"type": "circle", "length": TWO_PI})
    assert isinstance(g, SphericalGraph)
    assert g.n_segments == 2
    assert sum(g.seg_len) == pytest.approx(TWO_PI)


def test_circle_large_theta_accepted():
    g = make_space({"type": "circle", "length": TWO_PI + 3.3})
    assert validate_space(g).passed


def test_suspension_three_arcs():
    g = make_space({"type": "suspension", "arcs": 3})
    assert len(g.ext_vertex_ids) == 2
    assert g.n_segments == 3
    assert all(l == pytest.approx(PI) for l in g.seg_len)
    lengths = cycle_lengths_oracle(g)
    assert lengths and all(l == pytest.approx(TWO_PI) for l in lengths)


def test_girth_violation_reported():
    g = build_space({"type": "circle", "length": TWO_PI - 0.1})
    rep = validate_space(g)
    assert not rep.passed
    girth = [c for c in rep.checks if c.name == "girth"][0]
    assert not girth.passed and girth.margin == pytest.approx(-0.1)
    with pytest.raises(SpaceValidationError):
        make_space({"type": "circle", "length": TWO_PI - 0.1})


def test_degree_violation_reported():
    g = build_space({"type": "graph", "vertices": [0, 1],
                     "edges": [{"a": 0, "b": 1, "len": 3.2}]})
    rep = validate_space(g)
    assert not rep.passed
    deg = [c for c in rep.checks if c.name == "min_degree"][0]
    assert not deg.passed and deg.margin == -1.0


def test_circle_validation_threshold():
    for L in (TWO_PI - 0.3, TWO_PI - 1e-6, TWO_PI, TWO_PI + 1e-6, TWO_PI + 2.0):
        rep = validate_space(build_space({"type": "circle", "length": L}))
        assert rep.passed == (L >= TWO_PI - 1e-9)


def test_long_edges_subdivided():
    g = make_circle(TWO_PI + 3.3)
    assert max(g.seg_len) <= PI + 1e-12
    assert sum(g.seg_len) == pytest.approx(TWO_PI + 3.3)


def test_subdivision_leaves_distances_unchanged():
    L = TWO_PI + 0.9
    g1 = make_circle(L)
    cuts = [1.3, 2.9, 4.1, 5.5]
    verts = list(range(len(cuts)))
    edges = []
    for i in range(len(cuts)):
        a, b = cuts[i], cuts[(i + 1) % len(cuts)]
        edges.append((i, (i + 1) % len(cuts), (b - a) % L))
    g2 = SphericalGraph(verts, edges)

    def locate(off):
        rel = (off - cuts[0]) % L
        acc = 0.0
        for e, (_a, _b, l) in enumerate(g2.edges_ext):
            if rel <= acc + l + 1e-12:
                return g2.point_on_edge(e, rel - acc)
            acc += l
        return g2.point_on_edge(len(g2.edges_ext) - 1, g2.edges_ext[-1][2])

    rng = random.Random(11)
    for _ in range(60):
        o1, o2 = rng.random() * L, rng.random() * L
        d1 = geodesy.distance(g1, g1.point_on_edge(0, o1), g1.point_on_edge(0, o2),
                              truncated=False)
        d2 = geodesy.distance(g2, locate(o1), locate(o2), truncated=False)
        assert abs(d1 - d2) <= 1e-12


def test_cone_four_point_sampled():
    K = build_space({"type": "cone", "base": {"type": "circle", "length": TWO_PI + 0.5}})
    rep = validate_space(K, quadruples=10_000)
    assert rep.passed
    fp = [c for c in rep.checks if c.name == "cat0_four_point"][0]
    assert fp.margin is not None and fp.margin >= 0  # worst violation <= 1e-9


def test_cone_theta_excess():
    K = build_space({"type": "cone", "base": {"type": "circle", "length": TWO_PI + 0.5}})
    assert isinstance(K, ConeSpace)
    assert K.theta_excess == pytest.approx(0.5)
    K2 = ConeSpace(make_suspension(3))
    assert K2.theta_excess is None


def test_point_vocabulary_roundtrip():
    g = make_circle(TWO_PI + 0.5)
    p = g.parse_point({"edge": 0, "offset": 2.8})
    assert g.external_locus(p) == {"edge": 0, "offset": pytest.approx(2.8)}
    v = g.parse_point({"vertex": 0})
    assert g.external_locus(v) == {"vertex": 0}
    # offsets at exactly 0/length normalize to the vertex
    assert g.parse_point({"edge": 0, "offset": 0.0}).vertex is not None
    with pytest.raises(ParseError):
        g.parse_point({"edge": 0, "offset": 99.0})
    with pytest.raises(ParseError):
        g.parse_point({"vertex": 42})

    K = ConeSpace(g)
    c = K.parse_point({"edge": 0, "offset": 1.0, "radius": 2.0})
    assert K.external_locus(c)["radius"] == pytest.approx(2.0)
    assert K.parse_point({"radius": 0.0}).is_apex
    assert K.parse_point({"apex": True, "radius": 0}).is_apex
    with pytest.raises(ParseError):
        K.parse_point({"edge": 0, "offset": 1.0, "radius": -1.0})


def test_tiny_ball_spec():
    with pytest.raises(Exception):
        TinyBallSpec(apex(), 1.5)
    TinyBallSpec(apex(), 0.5)


def test_random_graphs_validate():
    rng = random.Random(5)
    for _ in range(10):
        g = random_spherical_graph(rng)
        assert validate_space(g).passed


def test_girth_matches_enumeration_oracle():
    from gcba_kit.spaces import _girth

    rng = random.Random(17)
    for _ in range(15):
        g = random_spherical_graph(rng)
        assert _girth(g) == pytest.approx(girth_oracle(g), abs=1e-9)


def test_parse_errors():
    with pytest.raises(ParseError):
        build_space("{not json")
    with pytest.raises(ParseError):
        build_space({"type": "dodecahedron"})
    with pytest.raises(ParseError):
        build_space({"type": "graph", "vertices": [0], "edges": [{"a": 0, "b": 1, "len": 1}]})
    with pytest.raises(ParseError):
        build_space({"type": "circle", "length": -1.0})
