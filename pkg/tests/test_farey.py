from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shearlab.errors import BoundaryEdgeAtDepth, DepthLimit, UnknownEdge, WindowExceedsDepth
from shearlab.farey import (
    INFINITY,
    ONE,
    ZERO,
    FareyVertex,
    apply_psl2z,
    edge_key,
    enumerate_tesselation,
    exact_cross_ratio,
    neighbors,
    parse_serialized,
    psl2z_to_base,
)

V = FareyVertex.from_pair


@pytest.fixture(scope="module")
def t6():
    return enumerate_tesselation(6)


def test_base_triangle():
    t = enumerate_tesselation(0)
    assert len(t.edges) == 3
    assert {str(e) for e in t.edges.values()} == {"0/1 1/1 0", "1/1 1/0 0", "0/1 1/0 0"}
    assert t.interior_edges() == []


@pytest.mark.parametrize("depth", range(0, 11))
def test_edge_counts(depth):
    t = enumerate_tesselation(depth)
    for n in range(depth + 1):
        assert len(t.edges_of_generation(n)) == (3 if n == 0 else 3 * 2 ** n)
    assert len(t.edges) == 3 * 2 ** (depth + 1) - 3


def test_depth_guard():
    with pytest.raises(DepthLimit):
        enumerate_tesselation(31)
    with pytest.raises(DepthLimit):
        enumerate_tesselation(-1)


def test_edges_join_neighbors(t6):
    for u, v in t6.edges:
        assert neighbors(u, v)
        assert abs(u.numerator * v.denominator - u.denominator * v.numerator) == 1


def test_interior_quadruples_have_unit_cross_ratio(t6):
    for e in t6.interior_edges():
        assert exact_cross_ratio(t6.edge_quadruple(e)) == 1


def test_edge_quadruple_convention():
    t = enumerate_tesselation(1)
    q = t.edge_quadruple(t.edge(ZERO, INFINITY))
    assert tuple(q) == (0, 1, float("inf"), -1)
    with pytest.raises(BoundaryEdgeAtDepth):
        t.edge_quadruple(t.edge(ZERO, V(1, 2)))
    with pytest.raises(UnknownEdge):
        t.edge(ZERO, V(2, 3))


def test_generation_matches_definition(t6):
    # the new vertex of a triangle is the mediant of its parent edge
    for tri in t6.triangles[1:]:
        u, w, v = tri.vertices
        assert tri.generation == t6.generation(edge_key(u, w)) == t6.generation(edge_key(w, v))
        assert tri.generation == t6.generation(tri.parent) + 1


def test_generations_differ_by_psl2z(t6):
    # an integer matrix taking a triangle to the base has no control over generation
    # but must map Farey edges to Farey edges
    for tri in t6.triangles[1:20]:
        m = psl2z_to_base(tri)
        assert sorted(apply_psl2z(m, v).sort_key() for v in tri.vertices) == sorted(v.sort_key() for v in (ZERO, ONE, INFINITY))


def test_fan_at_infinity(t6):
    f = t6.fan(INFINITY)
    for j in range(-6, 7):
        assert f.endpoint(j) == V(j, 1)
    # the lowest-generation edge sits at 0 with the smaller endpoint
    assert f.edge(0).key == edge_key(ZERO, INFINITY)


def test_fan_at_zero(t6):
    f = t6.fan(ZERO)
    assert [str(f.endpoint(j)) for j in (-1, 0, 1, 2)] == ["1/2", "1/1", "1/0", "-1/1"]


def test_fan_quadruples_have_unit_cross_ratio(t6):
    for p in t6.vertices:
        f = t6.fan(p)
        idx = sorted(f.edges)
        for m in idx:
            for k in range(1, 4):
                if m - k in f.edges and m + k in f.edges:
                    assert exact_cross_ratio(t6.fan_quadruple(p, m, k)) == 1


def test_fan_window_guard(t6):
    with pytest.raises(WindowExceedsDepth):
        t6.fan(INFINITY).edge(100)


def test_fan_reindex(t6):
    f = t6.fan(V(1, 3))
    g = f.reindexed(5)
    for j in f.edges:
        assert g.edge(j + 5) == f.edge(j)


def test_serialization_round_trip():
    t = enumerate_tesselation(4)
    text = t.serialize()
    assert len(text.splitlines()) == len(t.edges)
    assert parse_serialized(text) == list(t.edges.values())


@given(st.integers(-50, 50), st.integers(1, 50))
def test_vertex_parse_round_trip(p, q):
    fr = Fraction(p, q)
    v = V(fr.numerator, fr.denominator)
    assert FareyVertex.parse(str(v)) == v
    assert v.exact == fr


def test_infinity_vertex():
    assert INFINITY.is_infinity and str(INFINITY) == "1/0"
    assert FareyVertex.parse("1/0") == INFINITY
    with pytest.raises(ValueError):
        FareyVertex(2, 4)


def test_vertices_are_new_once(t6):
    assert len(set(t6.vertices)) == len(t6.vertices) == 3 * 2 ** 6
