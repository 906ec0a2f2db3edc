"""Triangle promise problem: oracles, instances, and the three builders."""

import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lgkit.complexity import complexity
from lgkit.indexing import num_pairs, pair_position
from lgkit.triangle import (
    GraphInstance,
    TriangleParams,
    build_sparsenew_lg,
    delta_mean_pairs,
    delta_sets,
    edge_exp_exact,
    has_triangle,
    ninter_exact,
    ninter_sq_exact,
    oracle_delta_exact,
    triangle_function,
    triangles,
)
from lgkit.validate import validate

K3 = GraphInstance.from_edges(3, [(0, 1), (0, 2), (1, 2)])
P3 = GraphInstance.from_edges(3, [(0, 1), (1, 2)])


def graph_instances(max_n=6):
    return st.integers(3, max_n).flatmap(
        lambda n: st.builds(
            GraphInstance, st.just(n), st.integers(0, (1 << num_pairs(n)) - 1)
        )
    )


# ---------------------------------------------------------------------------
# Instances and enumeration


def test_instance_geometry():
    assert K3.m == 3
    assert P3.m == 2
    assert P3.neighbors(1) == {0, 2}
    assert P3.common_neighbors(0, 2) == {1}
    assert P3.common_neighbors(0, 0) == {1}
    assert P3.degrees == (1, 2, 1)
    assert P3.d2 == pytest.approx(math.sqrt(6 / 3))


def test_instance_json_round_trip():
    obj = P3.to_json()
    assert obj["edges"] == [[1, 2], [2, 3]]
    again = GraphInstance.from_json(json.loads(json.dumps(obj)))
    assert again == P3


def test_triangle_enumeration():
    assert list(triangles(3, K3.z)) == [(0, 1, 2)]
    assert list(triangles(3, P3.z)) == []
    assert has_triangle(3, K3.z) and not has_triangle(3, P3.z)


def test_triangle_function_n3():
    f = triangle_function(3)
    assert f.positives() == (7,)
    assert f.certs[7] == (0, 1, 2)
    assert len(f.domain) == 8


def test_triangle_function_n4_counts():
    f = triangle_function(4)
    assert len(f.positives()) == 23
    assert len(f.negatives()) == 41
    full = (1 << 6) - 1
    assert f.certs[full] == (
        pair_position(0, 1, 4),
        pair_position(0, 2, 4),
        pair_position(1, 2, 4),
    )


@given(graph_instances(5))
@settings(max_examples=60, deadline=None)
def test_certificate_bits_force_a_triangle(g):
    f = triangle_function(g.n)
    if not has_triangle(g.n, g.z):
        return
    cert = f.certs[g.z]
    assert all((g.z >> p) & 1 for p in cert)
    forced = sum(1 << p for p in cert)
    assert has_triangle(g.n, forced)


# ---------------------------------------------------------------------------
# Pair families


def test_delta_sets_path_by_hand():
    d = delta_sets(P3, (1,), B=(0, 1), w=0)
    assert d.base == {(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)}
    assert d.restricted == {(0, 1), (1, 0), (1, 1)}
    assert d.anchored == {(1, 1)}


def test_delta_sets_requires_b_for_anchor():
    with pytest.raises(ValueError):
        delta_sets(P3, (0,), w=1)


@given(graph_instances(5), st.data())
@settings(max_examples=60, deadline=None)
def test_adding_edges_shrinks_base_pairs(g, data):
    missing = [
        p for p in range(num_pairs(g.n)) if not (g.z >> p) & 1
    ]
    if not missing:
        return
    p = data.draw(st.sampled_from(missing))
    x = data.draw(st.integers(1, g.n - 1))
    X = tuple(range(x))
    denser = GraphInstance(g.n, g.z | (1 << p))
    assert delta_sets(denser, X).base <= delta_sets(g, X).base


def test_delta_oracle_frozen():
    assert oracle_delta_exact(K3, (0, 1, 2), 1) == 2
    empty = GraphInstance(3, 0)
    assert oracle_delta_exact(empty, (0, 1, 2), 1) == 0


@given(graph_instances(6), st.data())
@settings(max_examples=40, deadline=None)
def test_delta_dual_routes_agree(g, data):
    b = data.draw(st.integers(1, g.n))
    x = data.draw(st.integers(1, g.n))
    B = tuple(range(b))
    assert oracle_delta_exact(g, B, x) == delta_mean_pairs(g, B, x)


# ---------------------------------------------------------------------------
# Subset intersection moments


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_intersection_mean_is_exact(data):
    n1 = data.draw(st.integers(1, 10))
    V1 = tuple(range(n1))
    N = tuple(data.draw(st.sets(st.sampled_from(V1))) if n1 else ())
    x = data.draw(st.integers(1, n1))
    assert ninter_exact(V1, N, x) == Fraction(x * len(N), n1)


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_intersection_second_moment_bound(data):
    n1 = data.draw(st.integers(2, 10))
    V1 = tuple(range(n1))
    N = tuple(data.draw(st.sets(st.sampled_from(V1), min_size=1)))
    x = data.draw(st.integers(1, n1))
    mean = Fraction(x * len(N), n1)
    if mean < 1:
        return
    assert ninter_sq_exact(V1, N, x) <= 2 * mean * mean


def test_edge_incidence_frozen():
    assert edge_exp_exact(P3, 1, 1) == Fraction(4, 9)
    assert edge_exp_exact(K3, 1, 1) == Fraction(2, 3)


@given(graph_instances(6), st.data())
@settings(max_examples=60, deadline=None)
def test_edge_incidence_closed_form(g, data):
    x = data.draw(st.integers(1, g.n))
    y = data.draw(st.integers(1, g.n))
    assert edge_exp_exact(g, x, y) == Fraction(2 * x * y * g.m, g.n * g.n)


# ---------------------------------------------------------------------------
# Builders


def test_param_validation():
    with pytest.raises(ValueError, match="variant"):
        TriangleParams(1, 2, 2, "fast")
    with pytest.raises(ValueError):
        TriangleParams(1, 2, 3)
    with pytest.raises(ValueError):
        TriangleParams(0, 2, 2)
    from lgkit.triangle import build_dense_lg

    with pytest.raises(ValueError, match="capped"):
        build_dense_lg(6, TriangleParams(1, 2, 2))
    with pytest.raises(ValueError, match="2 <= b"):
        build_sparsenew_lg(4, 1)


def test_dense_builder_smallest_case():
    from lgkit.triangle import build_dense_lg

    res = build_dense_lg(3, TriangleParams(1, 2, 2))
    assert res.function.values == triangle_function(3).values
    assert validate(res.graph, res.function).ok
    rep = complexity(res.graph, res.function)
    assert rep.c1 <= 1.0


def test_builders_match_fixture_functions(tri4, dense4, sparse4, anchored4):
    for res in (dense4, sparse4, anchored4):
        assert res.function.values == tri4.values


def test_sparsenew_warns_when_walk_too_small():
    with pytest.warns(UserWarning, match="b="):
        build_sparsenew_lg(4, 2, m=6)


def test_build_result_params_recorded(dense4):
    assert dense4.variant == "dense"
    assert dense4.params["x"] == 1
    assert dense4.params["n"] == 4
