"""Disjunction, stage rebalance and set-walk composition."""

import math

import pytest

from lgkit.combinators import (
    CompositionError,
    JohnsonSpec,
    edge_c1_cap,
    johnson_compose,
    normalize_c1,
    or_compose,
    rebalance_stage,
)
from lgkit.complexity import complexity, graph_c0, graph_c1
from lgkit.model import BooleanFunction, GraphBuilder
from lgkit.rules import ONE, TableRule
from lgkit.validate import validate


def _bit_child(n_bits, i, domain):
    """Loads bit ``i``; positive when that bit is set."""
    b = GraphBuilder(n_bits)
    b.add_vertex("s", (i,))
    b.add_ordinary("r", "s", i, ONE, ONE)
    f = BooleanFunction(
        n_bits, {z: (z >> i) & 1 for z in domain}
    )
    return b.graph(flows={y: {0: 1.0} for y in f.positives()}), f


@pytest.mark.parametrize("n,k", [(8, 1), (8, 2), (8, 4), (6, 2)])
def test_or_cost_is_sqrt_n_over_k(n, k):
    full = (1 << n) - 1
    domain = (0, full)
    children = [_bit_child(n, i, domain) for i in range(n)]
    res = or_compose(children, k)
    rep = complexity(res.graph, res.function)
    assert rep.c1 == 1.0
    assert rep.c0 == n / k
    assert rep.value == math.sqrt(n / k)
    assert validate(res.graph, res.function).ok


def _and_child(n_bits, i, j, domain):
    b = GraphBuilder(n_bits)
    b.add_vertex("a", (i,))
    b.add_vertex("s", (i, j))
    b.add_ordinary("r", "a", i, ONE, ONE)
    b.add_ordinary("a", "s", j, ONE, ONE)
    f = BooleanFunction(n_bits, {z: int(z >> i & 1 and z >> j & 1) for z in domain})
    return b.graph(flows={y: {0: 1.0, 1: 1.0} for y in f.positives()}), f


def test_or_negative_cost_is_weighted_sum_of_children():
    domain = tuple(range(16))
    c0_ = _and_child(4, 0, 1, domain)
    c1_ = _and_child(4, 2, 3, domain)
    res = or_compose([c0_, c1_], 1)
    for z in domain:
        expected = sum(
            lam * graph_c0(g, z) for lam, (g, _) in zip(res.lambdas, [c0_, c1_])
        )
        assert graph_c0(res.graph, z) == pytest.approx(expected, rel=1e-12)


def test_or_dead_child_gets_zero_weight():
    domain = (0, 3)
    live = _bit_child(2, 0, {0: 0, 3: 1})
    dead_f = BooleanFunction(2, {0: 0, 3: 0})
    dead = (_bit_child(2, 1, {0: 0, 3: 1})[0], dead_f)
    res = or_compose([dead, live], 1)
    assert res.lambdas[0] == 0.0
    assert res.function.values == live[1].values
    rep = complexity(res.graph, res.function)
    assert rep.value == complexity(*live).value


def test_or_routing_override():
    domain = (0, 3)
    children = [_bit_child(2, i, domain) for i in range(2)]
    default = or_compose(children, 1)
    assert set(default.graph.flow_for(3)) == {0}
    routed = or_compose(children, 1, routing={3: [1]})
    assert set(routed.graph.flow_for(3)) == {1}
    with pytest.raises(CompositionError):
        or_compose(children, 1, routing={3: [0, 1]})


def test_or_routing_rejects_negative_child():
    domain = (0, 1)
    children = [_bit_child(2, i, domain) for i in range(2)]
    with pytest.raises(CompositionError):
        or_compose(children, 1, routing={1: [1]})


def test_or_rejects_starved_input():
    children = [_bit_child(2, i, tuple(range(4))) for i in range(2)]
    with pytest.raises(CompositionError, match="positive children"):
        or_compose(children, 2)


def test_or_rejects_domain_mismatch():
    a = _bit_child(2, 0, (0, 3))
    c = _bit_child(2, 1, (0, 1, 3))
    with pytest.raises(CompositionError):
        or_compose([a, c], 1)


def test_or_rejects_bad_fan_in():
    children = [_bit_child(2, 0, (0, 3))]
    with pytest.raises(CompositionError):
        or_compose(children, 0)
    with pytest.raises(CompositionError):
        or_compose(children, 2)


def test_normalize_c1_exact():
    g, f = _and_child(2, 0, 1, tuple(range(4)))
    scaled_g = normalize_c1(g, f)
    assert graph_c1(scaled_g, 3) == pytest.approx(1.0, abs=1e-12)


def test_rebalance_stage_scales_to_unit_cost():
    domain = (0, 15)
    children = [_bit_child(4, i, domain) for i in range(4)]
    b = GraphBuilder(4)
    emaps = []
    for i, (g, _) in enumerate(children):
        _, emap = b.merge(g, prefix=f"c{i}.", vmap={g.root: b.root})
        emaps.append(emap[0])
    flows = {15: {ei: 0.25 for ei in emaps}}
    g = b.graph(flows=flows)
    out, factors, n_used = rebalance_stage(g, emaps)
    assert n_used == 4
    assert all(lam == 0.25 for lam in factors.values())
    assert graph_c1(out, 15) == 1.0


def test_rebalance_stage_rejects_uneven_flow():
    domain = (0, 3)
    children = [_bit_child(2, i, domain) for i in range(2)]
    b = GraphBuilder(2)
    emaps = []
    for i, (g, _) in enumerate(children):
        _, emap = b.merge(g, prefix=f"c{i}.", vmap={g.root: b.root})
        emaps.append(emap[0])
    g = b.graph(flows={3: {emaps[0]: 0.75, emaps[1]: 0.25}})
    with pytest.raises(CompositionError, match="uniform"):
        rebalance_stage(g, emaps)


def test_edge_c1_cap_reads_weight_table():
    b = GraphBuilder(2)
    b.add_vertex("s", (0, 1))
    w1 = TableRule((0,), {(1,): 4.0}, 0.5)
    b.add_ordinary("r", "s", 1, ONE, w1)
    g = b.graph(const_flow={0: 1.0})
    assert edge_c1_cap(g.edges[0]) == 2.0


# ---------------------------------------------------------------------------
# Set walks


def _identity_walk():
    ground = (0, 1, 2, 3)
    f = BooleanFunction.from_predicate(4, lambda z: bin(z).count("1") >= 2)

    def cert(y):
        bits = [i for i in range(4) if (y >> i) & 1]
        return tuple(bits[:2])

    return JohnsonSpec(
        n_bits=4,
        ground=ground,
        k=2,
        r=2,
        positions=lambda A: tuple(sorted(A)),
        function=f,
        cert=cert,
    )


def test_johnson_identity_walk_shape():
    res = johnson_compose(_identity_walk())
    g = res.graph
    assert len(g.vertices) == 11
    assert len(g.edges) == 16
    assert res.n_used == 1
    assert res.c1_stage_bound == 2.0
    assert validate(g, res.function).ok


def test_johnson_stage_cost_at_most_one_each():
    res = johnson_compose(_identity_walk())
    g = res.graph
    for y in res.function.positives():
        flow = g.flow_for(y)
        for stage in g.stages:
            cost = sum(
                p * p / g.edges[ei].w1(y)
                for ei, p in flow.items()
                if ei in set(stage.edges) and p > 0
            )
            assert cost <= 1.0 + 1e-12
    rep = complexity(g, res.function)
    assert rep.c1 <= res.c1_stage_bound + 1e-12


def test_johnson_report_carries_raw_stage_totals():
    res = johnson_compose(_identity_walk())
    obj = complexity(res.graph, res.function).to_json()
    assert [s["name"] for s in obj["stages"]] == ["walk1", "walk2"]
    for s in obj["stages"]:
        assert s["c1_max"] <= 1.0 + 1e-12
        assert s["raw"]["c1_max"] >= s["c1_max"]
    assert obj["total"]["c"] == pytest.approx(
        complexity(res.graph, res.function).value
    )


def test_johnson_rejects_uneven_start_counts():
    owner = {0: (0,), 1: (1,), 2: ()}

    def positions(A):
        out = []
        for j in A:
            out.extend(owner[j])
        return tuple(sorted(out))

    f = BooleanFunction(3, {1: 1, 4: 1})
    certs = {1: (0,), 4: (2,)}
    spec = JohnsonSpec(
        n_bits=3,
        ground=(0, 1, 2),
        k=2,
        r=1,
        positions=positions,
        function=f,
        cert=lambda y: certs[y],
    )
    with pytest.raises(CompositionError, match="start count"):
        johnson_compose(spec)


def test_johnson_strict_mode_rejects_weak_certificate():
    f = BooleanFunction.from_predicate(2, lambda z: z == 3)
    spec = JohnsonSpec(
        n_bits=2,
        ground=(0, 1),
        k=1,
        r=1,
        positions=lambda A: tuple(sorted(A)),
        function=f,
        cert=lambda y: (0,),
    )
    with pytest.raises(CompositionError, match="force"):
        johnson_compose(spec)


def test_johnson_rejects_non_monotone_positions():
    def positions(A):
        return (0,) if len(A) == 1 else ()

    f = BooleanFunction(2, {3: 1})
    spec = JohnsonSpec(
        n_bits=2,
        ground=(0, 1),
        k=2,
        r=1,
        positions=positions,
        function=f,
        cert=lambda y: (1,),
    )
    with pytest.raises(CompositionError, match="monotone"):
        johnson_compose(spec)


def _leaf_factory_walk():
    """Walk over four elements, then a leaf that checks a shared flag bit."""
    ground = (0, 1, 2, 3)
    flag = 4

    def factory(A, kappa):
        amask = sum(1 << a for a in A)
        b = GraphBuilder(5)
        b.add_vertex("s", (flag,))
        b.add_ordinary("r", "s", flag, ONE, ONE)
        lf = BooleanFunction.from_predicate(
            5, lambda z: bool((z >> flag) & 1) and (z & amask) == kappa
        )
        return b.graph(flows={y: {0: 1.0} for y in lf.positives()}), lf

    f = BooleanFunction.from_predicate(
        5, lambda z: bin(z & 15).count("1") >= 2 and bool((z >> 4) & 1)
    )

    def cert(y):
        bits = [i for i in range(4) if (y >> i) & 1]
        return tuple(bits[:2])

    return JohnsonSpec(
        n_bits=5,
        ground=ground,
        k=2,
        r=2,
        positions=lambda A: tuple(sorted(A)),
        function=f,
        cert=cert,
        factory=factory,
    )


def test_johnson_leaf_factory():
    res = johnson_compose(_leaf_factory_walk())
    assert validate(res.graph, res.function).ok
    assert res.c1_stage_bound == 3.0
    rep = complexity(res.graph, res.function)
    assert rep.c1 <= res.c1_stage_bound + 1e-9
    assert res.lambdas, "per-context leaf weights recorded"


def test_johnson_super_edge_loads():
    """Elements owning two positions each produce embedded load gadgets."""
    ground = (0, 1, 2)

    def positions(A):
        out = []
        for j in A:
            out.extend((2 * j, 2 * j + 1))
        return tuple(sorted(out))

    def block_done(z, j):
        return (z >> (2 * j)) & 3 == 3

    f = BooleanFunction.from_predicate(
        6, lambda z: sum(block_done(z, j) for j in range(3)) >= 2
    )

    def cert(y):
        done = [j for j in range(3) if block_done(y, j)]
        return tuple(done[:2])

    spec = JohnsonSpec(
        n_bits=6,
        ground=ground,
        k=2,
        r=2,
        positions=positions,
        function=f,
        cert=cert,
        load_kind="dense",
    )
    res = johnson_compose(spec)
    assert res.graph.has_super()
    assert validate(res.graph, res.function).ok
