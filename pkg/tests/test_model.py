"""Graph construction and structural bookkeeping."""

import pytest

from lgkit.model import (
    BooleanFunction,
    GraphBuilder,
    ModelError,
    Vertex,
    topological_order,
)
from lgkit.loads import dense_load
from lgkit.rules import ConstRule, ONE


def _chain(n_bits=3):
    b = GraphBuilder(n_bits)
    b.add_vertex("a", (0,))
    b.add_vertex("b", (0, 1))
    b.add_ordinary("r", "a", 0, ONE, ONE)
    b.add_ordinary("a", "b", 1, ONE, ONE)
    return b


def test_builder_root_is_empty_labelled():
    b = GraphBuilder(4)
    g = b.graph()
    assert g.label(g.root) == ()


def test_add_vertex_is_idempotent():
    b = GraphBuilder(3)
    b.add_vertex("v", (1,))
    b.add_vertex("v", (1,))
    with pytest.raises(ModelError):
        b.add_vertex("v", (0, 1))


def test_ordinary_edge_requires_known_endpoints():
    b = GraphBuilder(3)
    with pytest.raises(ModelError):
        b.add_ordinary("r", "ghost", 0, ONE, ONE)


def test_edge_kinds():
    b = _chain()
    b.add_vertex("s", (0, 1, 2))
    b.add_empty("b", "s")
    g = b.graph()
    kinds = [e.kind for e in g.edges]
    assert kinds == ["ordinary", "ordinary", "empty"]
    assert g.edges[2].loads == ()


def test_super_edge_endpoint_labels():
    b = GraphBuilder(4)
    b.add_vertex("s", (1, 2))
    gadget = dense_load(4, (1, 2))
    b.add_super("r", "s", gadget)
    g = b.graph()
    assert g.edges[0].kind == "super"
    assert g.edges[0].loads == (1, 2)


def test_topological_order_detects_cycles():
    b = _chain()
    b.add_ordinary("b", "a", 2, ONE, ONE)
    g = b.graph()
    with pytest.raises(ModelError):
        topological_order(g)


def test_topological_order_of_chain():
    order = topological_order(_chain().graph())
    assert order.index("r") < order.index("a") < order.index("b")


def test_merge_shifts_labels():
    child = _chain().graph()
    b = GraphBuilder(3)
    b.add_vertex("mid", (2,))
    b.add_ordinary("r", "mid", 2, ONE, ONE)
    vmap, emap = b.merge(
        child,
        prefix="c.",
        vmap={child.root: "mid"},
        weight_wrap=lambda side, rule: rule,
        label_shift=(2,),
    )
    g = b.graph()
    assert g.label(vmap["b"]) == (0, 1, 2)
    assert len(emap) == 2


def test_merge_rejects_label_conflicts():
    child = _chain().graph()
    b = GraphBuilder(3)
    b.add_vertex("mid", (1,))  # shifted child labels would need (1,) unioned
    with pytest.raises(ModelError):
        b.merge(
            child,
            prefix="c.",
            vmap={child.root: "mid"},
            weight_wrap=lambda side, rule: rule,
        )


def test_flow_for_prefers_const():
    b = _chain()
    g = b.graph(flows={5: {0: 1.0}}, const_flow={0: 1.0, 1: 1.0})
    assert g.flow_for(3) == {0: 1.0, 1: 1.0}


def test_rescaled_scales_both_sides():
    g = _chain().graph()
    h = g.rescaled(2.0)
    assert h.edges[0].w0(0) == 2.0 * g.edges[0].w0(0)
    assert h.edges[0].w1(0) == 2.0 * g.edges[0].w1(0)


def test_boolean_function_from_predicate():
    f = BooleanFunction.from_predicate(3, lambda z: z % 2 == 1)
    assert f.positives() == tuple(z for z in range(8) if z % 2)
    assert f.negatives() == tuple(z for z in range(8) if not z % 2)
    assert f(5) == 1


def test_vertex_mask():
    v = Vertex("x", (0, 3))
    assert v.mask == 0b1001
