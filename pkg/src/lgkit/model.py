"""Graph and function model.

A learning graph here is a rooted DAG whose vertices carry sorted tuples of
loaded input positions.  Edges come in three kinds:

* ordinary: loads exactly one new position, carries a weight rule per side;
* empty: loads nothing, weight identically zero, never carries flow;
* super: stands for a whole embedded loading gadget (an inner graph with a
  unique sink), with host-side scale rules multiplying the inner weights.

Flows are stored per positive input as ``{edge index: value}`` maps; gadgets
whose flow does not depend on the input use a single shared map instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .indexing import mask_of
from .rules import Rule, ZERO, ONE, scaled


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: str
    label: tuple[int, ...]

    def __post_init__(self) -> None:
        if tuple(sorted(self.label)) != self.label or len(set(self.label)) != len(
            self.label
        ):
            raise ModelError(f"vertex {self.id!r} label must be a sorted set")

    @property
    def mask(self) -> int:
        return mask_of(self.label)


@dataclass
class SuperEdge:
    """An embedded loading gadget with a unique sink.

    ``inner`` is a standalone graph whose labels are relative to the host tail
    (its root label is empty).  ``c1_max`` optionally records a closed-form
    bound on the inner positive-side cost, used when a stage containing this
    edge is rebalanced.
    """

    inner: "LearningGraph"
    c1_max: float | None = None

    def __post_init__(self) -> None:
        sinks = [
            v.id
            for v in self.inner.vertices.values()
            if not self.inner.out_edges(v.id)
        ]
        if len(sinks) != 1:
            raise ModelError(f"super edge inner graph has sinks {sinks}, need one")
        self._sink = sinks[0]
        root = self.inner.vertices[self.inner.root]
        if root.label != ():
            raise ModelError("super edge inner root must have empty label")

    @property
    def sink(self) -> str:
        return self._sink

    @property
    def loads(self) -> tuple[int, ...]:
        return self.inner.vertices[self._sink].label


@dataclass
class Edge:
    src: str
    dst: str
    load: int | None
    w0: Rule
    w1: Rule
    gadget: SuperEdge | None = None

    @property
    def kind(self) -> str:
        if self.gadget is not None:
            return "super"
        return "empty" if self.load is None else "ordinary"

    @property
    def loads(self) -> tuple[int, ...]:
        if self.gadget is not None:
            return self.gadget.loads
        return () if self.load is None else (self.load,)

    def weight(self, side: int) -> Rule:
        return self.w1 if side else self.w0


@dataclass(frozen=True)
class StageInfo:
    """Named slice of the edge list, with optional rebalance factors."""

    name: str
    edges: tuple[int, ...]
    rebalance: dict[int, float] | None = None
    note: str = ""


@dataclass
class LearningGraph:
    n_bits: int
    root: str
    vertices: dict[str, Vertex]
    edges: list[Edge]
    flows: dict[int, dict[int, float]] | None = None
    const_flow: dict[int, float] | None = None
    stages: tuple[StageInfo, ...] | None = None
    _out: dict[str, tuple[int, ...]] | None = field(default=None, repr=False)
    _in: dict[str, tuple[int, ...]] | None = field(default=None, repr=False)

    def _adjacency(self) -> None:
        out: dict[str, list[int]] = {v: [] for v in self.vertices}
        inc: dict[str, list[int]] = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            out[e.src].append(i)
            inc[e.dst].append(i)
        self._out = {v: tuple(ix) for v, ix in out.items()}
        self._in = {v: tuple(ix) for v, ix in inc.items()}

    def out_edges(self, vid: str) -> tuple[int, ...]:
        if self._out is None:
            self._adjacency()
        return self._out[vid]

    def in_edges(self, vid: str) -> tuple[int, ...]:
        if self._in is None:
            self._adjacency()
        return self._in[vid]

    def label(self, vid: str) -> tuple[int, ...]:
        return self.vertices[vid].label

    def flow_for(self, y: int) -> dict[int, float] | None:
        if self.const_flow is not None:
            return self.const_flow
        if self.flows is None:
            return None
        return self.flows.get(y)

    def flow_inputs(self) -> tuple[int, ...]:
        if self.flows is not None:
            return tuple(sorted(self.flows))
        return ()

    def has_super(self) -> bool:
        return any(e.gadget is not None for e in self.edges)

    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if not self.out_edges(v))

    def rescaled(self, factor: float) -> "LearningGraph":
        """Multiply every weight (both sides) by ``factor``; flows unchanged."""
        if factor <= 0:
            raise ModelError(f"rescale factor must be positive, got {factor}")
        edges = []
        for e in self.edges:
            if e.kind == "empty":
                edges.append(replace(e))
            else:
                edges.append(
                    replace(e, w0=scaled(factor, e.w0), w1=scaled(factor, e.w1))
                )
        return LearningGraph(
            n_bits=self.n_bits,
            root=self.root,
            vertices=dict(self.vertices),
            edges=edges,
            flows=self.flows,
            const_flow=self.const_flow,
            stages=self.stages,
        )


@dataclass(frozen=True)
class BooleanFunction:
    """Partial boolean function on n-bit inputs, with optional certificates.

    ``values`` maps each promised input to 0 or 1.  ``certs`` may map positive
    inputs to a tuple of positions whose values force the function to 1 on the
    whole domain.
    """

    n_bits: int
    values: dict[int, int] = field(compare=True)
    certs: dict[int, tuple[int, ...]] | None = None

    def __post_init__(self) -> None:
        for z, v in self.values.items():
            if v not in (0, 1):
                raise ModelError(f"function value {v} at {z} not boolean")
            if z >> self.n_bits:
                raise ModelError(f"input {z} exceeds {self.n_bits} bits")

    def __call__(self, z: int) -> int:
        return self.values[z]

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(sorted(self.values))

    def positives(self) -> tuple[int, ...]:
        return tuple(sorted(z for z, v in self.values.items() if v))

    def negatives(self) -> tuple[int, ...]:
        return tuple(sorted(z for z, v in self.values.items() if not v))

    @classmethod
    def from_predicate(
        cls,
        n_bits: int,
        pred: Callable[[int], bool],
        domain: Iterable[int] | None = None,
        certs: Mapping[int, Sequence[int]] | None = None,
    ) -> "BooleanFunction":
        zs = range(1 << n_bits) if domain is None else domain
        values = {z: int(bool(pred(z))) for z in zs}
        cm = None
        if certs is not None:
            cm = {z: tuple(sorted(c)) for z, c in certs.items()}
        return cls(n_bits, values, cm)


class GraphBuilder:
    """Mutable construction helper; produces an immutable-by-convention graph."""

    def __init__(self, n_bits: int, root: str = "r") -> None:
        self.n_bits = n_bits
        self.root = root
        self.vertices: dict[str, Vertex] = {root: Vertex(root, ())}
        self.edges: list[Edge] = []

    def add_vertex(self, vid: str, label: Sequence[int]) -> str:
        lab = tuple(sorted(label))
        if vid in self.vertices:
            if self.vertices[vid].label != lab:
                raise ModelError(f"vertex {vid!r} redefined with a new label")
            return vid
        for i in lab:
            if not 0 <= i < self.n_bits:
                raise ModelError(f"label position {i} out of range at {vid!r}")
        self.vertices[vid] = Vertex(vid, lab)
        return vid

    def _check_ends(self, src: str, dst: str) -> None:
        for v in (src, dst):
            if v not in self.vertices:
                raise ModelError(f"edge endpoint {v!r} not a known vertex")

    def add_ordinary(self, src: str, dst: str, load: int, w0: Rule, w1: Rule) -> int:
        self._check_ends(src, dst)
        self.edges.append(Edge(src, dst, load, w0, w1))
        return len(self.edges) - 1

    def add_empty(self, src: str, dst: str) -> int:
        self._check_ends(src, dst)
        self.edges.append(Edge(src, dst, None, ZERO, ZERO))
        return len(self.edges) - 1

    def add_super(
        self,
        src: str,
        dst: str,
        gadget: SuperEdge,
        w0: Rule = ONE,
        w1: Rule = ONE,
    ) -> int:
        self._check_ends(src, dst)
        self.edges.append(Edge(src, dst, None, w0, w1, gadget=gadget))
        return len(self.edges) - 1

    def merge(
        self,
        child: LearningGraph,
        prefix: str,
        vmap: Mapping[str, str] | None = None,
        weight_wrap: Callable[[int, Rule], Rule] | None = None,
        label_shift: Sequence[int] = (),
    ) -> tuple[dict[str, str], dict[int, int]]:
        """Copy ``child`` into this builder.

        ``vmap`` identifies child vertices with existing ones (typically the
        child root with a host vertex).  Remaining vertices get ``prefix``
        prepended to their ids and ``label_shift`` unioned into their labels.
        ``weight_wrap`` transforms the weight rules of every non-empty edge;
        it receives the side (0 or 1) and the rule.  Returns the vertex and
        edge index mappings.
        """
        if child.n_bits != self.n_bits:
            raise ModelError("child graph input arity mismatch")
        vmap = dict(vmap or {})
        vout: dict[str, str] = {}
        shift = tuple(label_shift)
        for vid, v in child.vertices.items():
            if vid in vmap:
                tgt = vmap[vid]
                want = tuple(sorted(set(v.label) | set(shift)))
                if self.vertices[tgt].label != want:
                    raise ModelError(
                        f"merge target {tgt!r} label {self.vertices[tgt].label} "
                        f"differs from shifted child label {want}"
                    )
                vout[vid] = tgt
            else:
                lab = tuple(sorted(set(v.label) | set(shift)))
                vout[vid] = self.add_vertex(prefix + vid, lab)
        emap: dict[int, int] = {}
        for i, e in enumerate(child.edges):
            if e.kind == "empty":
                emap[i] = self.add_empty(vout[e.src], vout[e.dst])
                continue
            w0, w1 = e.w0, e.w1
            if weight_wrap is not None:
                w0, w1 = weight_wrap(0, w0), weight_wrap(1, w1)
            self.edges.append(
                Edge(vout[e.src], vout[e.dst], e.load, w0, w1, gadget=e.gadget)
            )
            emap[i] = len(self.edges) - 1
        return vout, emap

    def graph(
        self,
        flows: dict[int, dict[int, float]] | None = None,
        const_flow: dict[int, float] | None = None,
        stages: Sequence[StageInfo] | None = None,
    ) -> LearningGraph:
        return LearningGraph(
            n_bits=self.n_bits,
            root=self.root,
            vertices=dict(self.vertices),
            edges=list(self.edges),
            flows=flows,
            const_flow=const_flow,
            stages=tuple(stages) if stages is not None else None,
        )


def topological_order(g: LearningGraph) -> list[str]:
    """Vertices in a topological order; raises on cycles."""
    indeg = {v: len(g.in_edges(v)) for v in g.vertices}
    queue = sorted(v for v, d in indeg.items() if d == 0)
    out: list[str] = []
    import heapq

    heapq.heapify(queue)
    while queue:
        v = heapq.heappop(queue)
        out.append(v)
        for ei in g.out_edges(v):
            w = g.edges[ei].dst
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(queue, w)
    if len(out) != len(g.vertices):
        raise ModelError("graph contains a cycle")
    return out
