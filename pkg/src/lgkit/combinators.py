"""Composition of learning graphs.

Three operations:

* ``or_compose`` merges child graphs at a shared root, scaling each child's
  weights by its positive cost over the fan-in, and routes each positive
  input's flow through its first (or hinted) positive children.
* ``rebalance_stage`` rescales a stage whose flow is uniform so that the
  stage's positive cost is at most 1.
* ``johnson_compose`` builds a set-walk: paths load the positions attached to
  a start set, walk edges extend the set one element at a time, and leaf
  subgraphs supplied by a factory are spliced onto the full sets, scaled per
  context so the final stage's positive cost is at most 1.

Every operation keeps exact flow bookkeeping: flows are built from unit
fractions and recorded per positive input on the result.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

from .complexity import graph_c1
from .indexing import mask_of, pack_bits
from .loads import load_gadget, single_load_rules
from .model import (
    BooleanFunction,
    Edge,
    GraphBuilder,
    LearningGraph,
    StageInfo,
)
from .rules import DispatchRule, ProductRule, TableRule, ZERO, scaled


class CompositionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# OR


@dataclass
class OrResult:
    graph: LearningGraph
    function: BooleanFunction
    lambdas: tuple[float, ...]


def or_compose(
    children: Sequence[tuple[LearningGraph, BooleanFunction]],
    k: int,
    *,
    routing: Mapping[int, Sequence[int]] | None = None,
    prefix: str = "c",
) -> OrResult:
    """Compose child graphs disjunctively, merging their roots.

    Every positive input of the disjunction must have at least ``k`` positive
    children; its flow splits equally over the first ``k`` of them (or over
    ``routing[y]`` when given).  Children with no positive input are dead and
    get weight zero.
    """
    if k < 1:
        raise CompositionError(f"fan-in k={k} must be at least 1")
    if len(children) < k:
        raise CompositionError(f"need at least k={k} children, got {len(children)}")
    n_bits = children[0][0].n_bits
    domain = children[0][1].domain
    for g, f in children:
        if g.n_bits != n_bits or f.n_bits != n_bits:
            raise CompositionError("children disagree on input arity")
        if f.domain != domain:
            raise CompositionError("children disagree on the promised domain")
        if g.label(g.root) != ():
            raise CompositionError("child root labels must be empty")
    lambdas = []
    for g, f in children:
        pos = f.positives()
        if not pos:
            lambdas.append(0.0)
            continue
        lambdas.append(max(graph_c1(g, y) for y in pos) / k)
    b = GraphBuilder(n_bits, root="r")
    emaps: list[dict[int, int]] = []
    for i, (g, _) in enumerate(children):
        lam = lambdas[i]
        _, emap = b.merge(
            g,
            prefix=f"{prefix}{i}.",
            vmap={g.root: b.root},
            weight_wrap=lambda side, rule, lam=lam: scaled(lam, rule),
        )
        emaps.append(emap)
    values = {z: max(f(z) for _, f in children) for z in domain}
    fn = BooleanFunction(n_bits, values)
    flows: dict[int, dict[int, float]] = {}
    for y in fn.positives():
        live = [i for i, (_, f) in enumerate(children) if f(y)]
        if routing is not None and y in routing:
            chosen = list(routing[y])
            for i in chosen:
                if not children[i][1](y):
                    raise CompositionError(
                        f"routing for input {y} names negative child {i}"
                    )
        else:
            chosen = live[:k]
        if len(chosen) < k:
            raise CompositionError(
                f"input {y} has {len(live)} positive children, needs {k}"
            )
        if len(chosen) != k:
            raise CompositionError(f"routing for input {y} must name {k} children")
        fy: dict[int, float] = {}
        for i in chosen:
            child_flow = children[i][0].flow_for(y)
            if child_flow is None:
                raise CompositionError(f"child {i} lacks a flow for input {y}")
            for ei, p in child_flow.items():
                fy[emaps[i][ei]] = p / k
        flows[y] = fy
    graph = b.graph(flows=flows)
    return OrResult(graph, fn, tuple(lambdas))


# ---------------------------------------------------------------------------
# Stage rebalance


def edge_c1_cap(e: Edge, support_cap: int = 16) -> float:
    """Largest positive-side cost one unit of flow can incur on this edge."""
    if e.kind == "empty":
        raise CompositionError("empty transitions have no positive cost")
    if e.gadget is not None:
        if e.gadget.c1_max is not None:
            return e.gadget.c1_max
        inner = e.gadget.inner
        sup = sorted({i for ie in inner.edges for i in ie.w1.support})
        if len(sup) > support_cap:
            raise CompositionError(
                f"inner support of {len(sup)} positions is too large to scan"
            )
        best = 0.0
        for bits in itertools.product((0, 1), repeat=len(sup)):
            z = sum(1 << p for p, bit in zip(sup, bits) if bit)
            best = max(best, graph_c1(inner, z))
        return best
    sup = e.w1.support
    if len(sup) > support_cap:
        raise CompositionError(f"support of {len(sup)} positions is too large to scan")
    vals = []
    for bits in itertools.product((0, 1), repeat=len(sup)):
        z = sum(1 << p for p, bit in zip(sup, bits) if bit)
        w = e.w1(z)
        if w > 0:
            vals.append(1.0 / w)
    if not vals:
        return 0.0
    return max(vals)


def rebalance_stage(
    g: LearningGraph, stage_edges: Sequence[int], *, flow_atol: float = 1e-12
) -> tuple[LearningGraph, dict[int, float], int]:
    """Scale a uniform-flow stage so its positive cost is at most 1.

    Every recorded flow must put either 0 or exactly ``1/n_used`` on each
    stage edge, with the same ``n_used`` for every input; each stage edge then
    gets both weights multiplied by its cost cap over ``n_used``.  Returns the
    rescaled graph, the factors and ``n_used``.
    """
    stage = list(stage_edges)
    stage_set = set(stage)
    n_used: int | None = None
    flow_maps: Iterable[dict[int, float]]
    if g.flows is not None:
        flow_maps = g.flows.values()
    elif g.const_flow is not None:
        flow_maps = [g.const_flow]
    else:
        raise CompositionError("graph has no flows to rebalance against")
    for flow in flow_maps:
        vals = [p for ei, p in flow.items() if ei in stage_set and p > flow_atol]
        if not vals:
            raise CompositionError("a flow misses the stage entirely")
        lo, hi = min(vals), max(vals)
        if hi - lo > flow_atol:
            raise CompositionError(
                f"stage flow not uniform: values range {lo} to {hi}"
            )
        count = round(1.0 / hi)
        if abs(count * hi - 1.0) > 1e-9 or count != len(vals):
            raise CompositionError(
                f"stage flow {hi} is not 1 over the {len(vals)} used edges"
            )
        if n_used is None:
            n_used = count
        elif n_used != count:
            raise CompositionError(
                f"stage usage differs across inputs: {n_used} vs {count}"
            )
    assert n_used is not None
    factors: dict[int, float] = {}
    edges = list(g.edges)
    for ei in stage:
        e = edges[ei]
        if e.kind == "empty":
            continue
        lam = edge_c1_cap(e) / n_used
        factors[ei] = lam
        edges[ei] = replace(e, w0=scaled(lam, e.w0), w1=scaled(lam, e.w1))
    out = LearningGraph(
        n_bits=g.n_bits,
        root=g.root,
        vertices=dict(g.vertices),
        edges=edges,
        flows=g.flows,
        const_flow=g.const_flow,
        stages=g.stages,
    )
    return out, factors, n_used


def normalize_c1(g: LearningGraph, f: BooleanFunction) -> LearningGraph:
    """Rescale all weights so the positive cost becomes exactly 1."""
    cap = max((graph_c1(g, y) for y in f.positives()), default=0.0)
    if cap <= 0.0:
        raise CompositionError("graph has no positive cost to normalize")
    return g.rescaled(cap)


# ---------------------------------------------------------------------------
# Set walk


Factory = Callable[
    [tuple[int, ...], int],
    "tuple[LearningGraph, BooleanFunction] | None",
]


@dataclass
class JohnsonSpec:
    """Parameters of a set walk.

    ``ground`` lists the walk elements; ``positions`` maps a subset of ground
    elements to the input positions it owns; ``cert`` maps a positive input to
    the ``r`` elements whose presence in the final set lets the leaf finish.
    ``factory`` builds the leaf subgraph for a full set and a context (the
    input restricted to the set's positions); ``None`` uses a bare leaf and
    additionally enables the strict certificate check (the certificate's own
    positions must force the function to 1).
    """

    n_bits: int
    ground: tuple[int, ...]
    k: int
    r: int
    positions: Callable[[frozenset], Iterable[int]]
    function: BooleanFunction
    cert: Callable[[int], Sequence[int]]
    load_kind: str | Sequence[str] = "dense"
    factory: Factory | None = None
    prefix: str = "A"


@dataclass
class JohnsonResult:
    graph: LearningGraph
    function: BooleanFunction
    n_used: int
    c1_stage_bound: float
    lambdas: dict[tuple[int, ...], dict[tuple[int, ...], float]]


def _subset_id(prefix: str, A: Sequence[int]) -> str:
    return prefix + ":" + ",".join(str(a) for a in A)


def johnson_compose(spec: JohnsonSpec) -> JohnsonResult:
    ground = tuple(sorted(spec.ground))
    n_g = len(ground)
    if not 0 <= spec.r <= spec.k <= n_g:
        raise CompositionError(f"need r <= k <= |ground|, got {spec.r},{spec.k},{n_g}")
    kinds = (
        [spec.load_kind] * (spec.r + 1)
        if isinstance(spec.load_kind, str)
        else list(spec.load_kind)
    )
    if len(kinds) != spec.r + 1:
        raise CompositionError(f"need {spec.r + 1} load kinds, got {len(kinds)}")

    pos_cache: dict[frozenset, tuple[int, ...]] = {}

    def I(A: Iterable[int]) -> tuple[int, ...]:
        key = frozenset(A)
        if key not in pos_cache:
            pos_cache[key] = tuple(sorted(spec.positions(key)))
        return pos_cache[key]

    _spot_check_monotone(I, ground, spec.k)

    start = spec.k - spec.r
    b = GraphBuilder(spec.n_bits, root="r")
    vid: dict[tuple[int, ...], str] = {}
    for size in range(start, spec.k + 1):
        for A in itertools.combinations(ground, size):
            if size == 0:
                vid[A] = b.root
            else:
                vid[A] = b.add_vertex(_subset_id(spec.prefix, A), I(A))
    if start == 0 and I(()) != ():
        raise CompositionError("the empty set must own no positions")

    stage_edges: list[list[int]] = [[] for _ in range(spec.r + 1)]
    step_edge: dict[tuple[tuple[int, ...], int], int] = {}
    start_edge: dict[tuple[int, ...], int] = {}

    def add_load(src: str, dst: str, loads: tuple[int, ...], kind: str) -> int:
        if not loads:
            return b.add_empty(src, dst)
        if len(loads) == 1:
            w0, w1 = single_load_rules(kind, loads[0])
            return b.add_ordinary(src, dst, loads[0], w0, w1)
        return b.add_super(src, dst, load_gadget(kind, spec.n_bits, loads))

    if start >= 1:
        for A in itertools.combinations(ground, start):
            ei = add_load(b.root, vid[A], I(A), kinds[0])
            start_edge[A] = ei
            stage_edges[0].append(ei)
    for step in range(1, spec.r + 1):
        for A in itertools.combinations(ground, start + step - 1):
            have = set(A)
            for j in ground:
                if j in have:
                    continue
                bigger = tuple(sorted(have | {j}))
                inc = tuple(sorted(set(I(bigger)) - set(I(A))))
                ei = add_load(vid[A], vid[bigger], inc, kinds[step])
                step_edge[(A, j)] = ei
                stage_edges[step].append(ei)

    # Flow walks. A start set is usable for an input when it avoids the
    # certificate and owns at least one position (otherwise its path would be
    # an empty transition, which cannot carry flow).
    def usable_starts(T: Sequence[int]) -> list[tuple[int, ...]]:
        if start == 0:
            return [()]
        avoid = set(T)
        return [
            A
            for A in itertools.combinations(ground, start)
            if not (set(A) & avoid) and I(A)
        ]

    positives = spec.function.positives()
    n_used: int | None = None
    certs: dict[int, tuple[int, ...]] = {}
    for y in positives:
        T = tuple(sorted(spec.cert(y)))
        if len(T) != spec.r or len(set(T)) != spec.r or not set(T) <= set(ground):
            raise CompositionError(f"bad certificate {T} for input {y}")
        certs[y] = T
        count = len(usable_starts(T))
        if n_used is None:
            n_used = count
        elif n_used != count:
            raise CompositionError(
                f"usable start count differs across inputs: {n_used} vs {count}"
            )
    if n_used == 0:
        raise CompositionError("no usable start sets: every start owns no positions")
    if n_used is None:
        n_used = max(1, len(usable_starts(())))

    flows: dict[int, dict[int, float]] = {}
    unit = 1.0 / n_used
    for y in positives:
        T = certs[y]
        fy: dict[int, float] = {}
        for A in usable_starts(T):
            if start >= 1:
                fy[start_edge[A]] = fy.get(start_edge[A], 0.0) + unit
            cur = A
            for j in T:
                ei = step_edge[(cur, j)]
                if b.edges[ei].kind == "empty":
                    raise CompositionError(
                        f"flow walk for input {y} crosses the empty step "
                        f"{cur} + {j}"
                    )
                fy[ei] = fy.get(ei, 0.0) + unit
                cur = tuple(sorted(set(cur) | {j}))
        flows[y] = fy

    # Rebalance the loading stages against the usable start count.
    factors: dict[int, float] = {}
    for step in range(spec.r + 1):
        for ei in stage_edges[step]:
            e = b.edges[ei]
            if e.kind == "empty":
                continue
            lam = edge_c1_cap(e) / n_used
            factors[ei] = lam
            b.edges[ei] = replace(e, w0=scaled(lam, e.w0), w1=scaled(lam, e.w1))

    # Leaf stage.
    strict = spec.factory is None
    leaf_edges: list[int] = []
    lambdas: dict[tuple[int, ...], dict[tuple[int, ...], float]] = {}
    domain = spec.function.domain
    if spec.factory is not None:
        for A in itertools.combinations(ground, spec.k):
            ipos = I(A)
            mask = mask_of(ipos)
            contexts = sorted({z & mask for z in domain})
            built: dict[int, tuple[LearningGraph, BooleanFunction]] = {}
            for kappa in contexts:
                child = spec.factory(A, kappa)
                if child is not None:
                    built[kappa] = child
            if not built:
                continue
            ref = next(iter(built.values()))[0]
            ref_shape = [(e.src, e.dst, e.load) for e in ref.edges]
            lamrow: dict[tuple[int, ...], float] = {}
            for kappa, (cg, cf) in built.items():
                if (
                    list(cg.vertices) != list(ref.vertices)
                    or [(e.src, e.dst, e.load) for e in cg.edges] != ref_shape
                ):
                    raise CompositionError(
                        f"leaf structures differ across contexts at {A}"
                    )
                pos = cf.positives()
                if pos:
                    lam = max(graph_c1(cg, y) for y in pos) / n_used
                    lamrow[pack_bits(kappa, ipos)] = lam
            lambdas[A] = {bits: v for bits, v in lamrow.items()}
            host = TableRule(ipos, lamrow, 0.0) if ipos else None
            if host is None:
                const = lamrow.get((), 0.0)
                wrap = lambda side, rule, c=const: scaled(c, rule)
            else:
                wrap = lambda side, rule, h=host: ProductRule(h, rule)
            merged_rules = _merge_leaf_rules(built, ref, ipos)
            shell = LearningGraph(
                n_bits=ref.n_bits,
                root=ref.root,
                vertices=dict(ref.vertices),
                edges=merged_rules,
                flows=None,
                const_flow=None,
            )
            _, emap = b.merge(
                shell,
                prefix=_subset_id(spec.prefix, A) + "/",
                vmap={ref.root: vid[A]},
                weight_wrap=wrap,
                label_shift=ipos,
            )
            leaf_edges.extend(emap.values())
            for y in positives:
                T = certs[y]
                if not set(T) <= set(A):
                    continue
                rest = tuple(sorted(set(A) - set(T)))
                if start >= 1 and (set(rest) & set(T) or not I(rest)):
                    continue
                kappa = y & mask
                if kappa not in built:
                    raise CompositionError(
                        f"no leaf for context of input {y} at {A}"
                    )
                cg, cf = built[kappa]
                if not cf(y):
                    raise CompositionError(
                        f"walk reaches {A} on input {y} but the leaf is negative"
                    )
                cflow = cg.flow_for(y)
                if cflow is None:
                    raise CompositionError(f"leaf at {A} lacks a flow for {y}")
                fy = flows[y]
                for ci, p in cflow.items():
                    fy[emap[ci]] = fy.get(emap[ci], 0.0) + p * unit
    else:
        for y in positives:
            T = certs[y]
            tpos = I(T)
            tmask = mask_of(tpos)
            key = y & tmask
            for z in domain:
                if z & tmask == key and not spec.function(z):
                    raise CompositionError(
                        f"certificate {T} of input {y} does not force the "
                        f"function (input {z} is negative)"
                    )

    stages = [
        StageInfo(
            f"load{step}" if step == 0 else f"walk{step}",
            tuple(stage_edges[step]),
            rebalance={
                ei: factors[ei] for ei in stage_edges[step] if ei in factors
            },
        )
        for step in range(spec.r + 1)
        if stage_edges[step]
    ]
    if leaf_edges:
        stages.append(StageInfo("leaf", tuple(leaf_edges)))
    graph = b.graph(flows=flows, stages=stages)
    # each assembled stage carries positive cost at most 1
    bound = float(len(stages))
    return JohnsonResult(graph, spec.function, n_used, bound, lambdas)


def _merge_leaf_rules(
    built: dict[int, tuple[LearningGraph, BooleanFunction]],
    ref: LearningGraph,
    ipos: tuple[int, ...],
) -> list:
    """Combine per-context leaf weights into one edge list.

    Where contexts agree the shared rule is kept; where they differ the rule
    dispatches on the context positions.
    """
    out = []
    for i, e in enumerate(ref.edges):
        if e.kind == "empty":
            out.append(replace(e))
            continue
        w = []
        for side in (0, 1):
            variants = {
                pack_bits(kappa, ipos): (cg.edges[i].w1 if side else cg.edges[i].w0)
                for kappa, (cg, _) in built.items()
            }
            distinct = set(map(id, variants.values()))
            first = next(iter(variants.values()))
            if len(distinct) == 1 or all(v == first for v in variants.values()):
                w.append(first)
            else:
                w.append(DispatchRule(ipos, variants, ZERO))
        out.append(replace(e, w0=w[0], w1=w[1]))
    return out


def _spot_check_monotone(
    I: Callable[[Iterable[int]], tuple[int, ...]],
    ground: tuple[int, ...],
    k: int,
    samples: int = 8,
) -> None:
    rng = random.Random(0)
    for _ in range(samples):
        chain = list(ground)
        rng.shuffle(chain)
        chain = chain[: min(k, len(chain))]
        prev: set[int] = set(I(()))
        cur: list[int] = []
        for j in sorted(chain):
            cur.append(j)
            now = set(I(cur))
            if not prev <= now:
                raise CompositionError(
                    f"positions not monotone along {cur}: lost {prev - now}"
                )
            prev = now
