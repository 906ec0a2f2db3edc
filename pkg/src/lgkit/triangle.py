"""Triangle detection on small graphs.

Inputs encode an undirected n-vertex graph: one bit per vertex pair, pairs
ordered lexicographically.  Three graph families detect a triangle:

* dense: an OR over excluded sets X of (a direct search for triangles meeting
  X) or (a two-level set walk searching for a triangle avoiding X);
* sparse: the same skeleton with sparse loading paths, plus a neighborhood
  based direct search;
* the anchored variant: an OR over anchor vertices w of a single set walk
  that loads adjacencies to w and probes pairs of its neighbors.

The module also carries the pair-set machinery (``delta_sets``) and the exact
counting oracles the composition analysis leans on.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

from .combinators import (
    CompositionError,
    JohnsonSpec,
    OrResult,
    johnson_compose,
    or_compose,
)
from .indexing import num_pairs, pair_position, position_pair
from .loads import DENSE, SPARSE, dense_load, sparse_load
from .model import BooleanFunction, GraphBuilder, LearningGraph
from .rules import CandidatePairRule, DenseLoadRule, ProductRule, TableRule

BUILD_CAP = 5
ORACLE_CAP = 10


# ---------------------------------------------------------------------------
# Instances


@dataclass(frozen=True)
class GraphInstance:
    """An n-vertex undirected graph as an edge bit mask."""

    n: int
    z: int

    def __post_init__(self) -> None:
        if self.z >> num_pairs(self.n):
            raise ValueError(f"edge mask has bits beyond {num_pairs(self.n)} pairs")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "GraphInstance":
        z = 0
        for u, v in edges:
            z |= 1 << pair_position(u, v, n)
        return cls(n, z)

    @property
    def m(self) -> int:
        return self.z.bit_count()

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            position_pair(p, self.n)
            for p in range(num_pairs(self.n))
            if (self.z >> p) & 1
        )

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool((self.z >> pair_position(u, v, self.n)) & 1)

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(u for u in range(self.n) if self.has_edge(u, v))

    def common_neighbors(self, u: int, v: int) -> frozenset[int]:
        if u == v:
            return self.neighbors(u)
        return self.neighbors(u) & self.neighbors(v)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(self.neighbors(v)) for v in range(self.n))

    @property
    def d2(self) -> float:
        degs = self.degrees
        return math.sqrt(sum(d * d for d in degs) / self.n)

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "edges": [[u + 1, v + 1] for u, v in self.edges],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "GraphInstance":
        return cls.from_edges(
            int(obj["n"]), [(int(u) - 1, int(v) - 1) for u, v in obj["edges"]]
        )


def triangles(n: int, z: int) -> Iterator[tuple[int, int, int]]:
    for t in itertools.combinations(range(n), 3):
        u, v, w = t
        if (
            (z >> pair_position(u, v, n)) & 1
            and (z >> pair_position(u, w, n)) & 1
            and (z >> pair_position(v, w, n)) & 1
        ):
            yield t


def has_triangle(n: int, z: int) -> bool:
    return next(triangles(n, z), None) is not None


def triangle_function(n: int) -> BooleanFunction:
    """Truth table of triangle containment over all pair masks.

    Positive inputs carry the three pair positions of their lexicographically
    first triangle as certificate.
    """
    if n < 3:
        raise ValueError("need at least 3 vertices for a triangle")
    if n > BUILD_CAP:
        raise ValueError(f"explicit domain capped at n <= {BUILD_CAP}")
    values: dict[int, int] = {}
    certs: dict[int, tuple[int, ...]] = {}
    for z in range(1 << num_pairs(n)):
        first = next(triangles(n, z), None)
        values[z] = int(first is not None)
        if first is not None:
            u, v, w = first
            certs[z] = tuple(
                sorted(
                    (
                        pair_position(u, v, n),
                        pair_position(u, w, n),
                        pair_position(v, w, n),
                    )
                )
            )
    return BooleanFunction(num_pairs(n), values, certs)


# ---------------------------------------------------------------------------
# Pair sets


@dataclass(frozen=True)
class DeltaSets:
    """Ordered vertex pairs (diagonal included) with no common neighbor in X.

    The diagonal entry (u, u) uses the plain neighborhood of u.  ``base`` is
    over all of V squared; ``restricted`` intersects with B squared when B is
    given; ``anchored`` further requires both components adjacent to the
    anchor w.
    """

    base: frozenset[tuple[int, int]]
    restricted: frozenset[tuple[int, int]] | None = None
    anchored: frozenset[tuple[int, int]] | None = None


def delta_sets(
    g: GraphInstance,
    X: Iterable[int],
    B: Iterable[int] | None = None,
    w: int | None = None,
) -> DeltaSets:
    xs = frozenset(X)
    base = frozenset(
        (u, v)
        for u in range(g.n)
        for v in range(g.n)
        if not (g.common_neighbors(u, v) & xs)
    )
    restricted = None
    anchored = None
    if B is not None:
        bs = frozenset(B)
        restricted = frozenset((u, v) for u, v in base if u in bs and v in bs)
        if w is not None:
            nw = g.neighbors(w)
            anchored = frozenset(
                (u, v) for u, v in restricted if u in nw and v in nw
            )
    elif w is not None:
        raise ValueError("anchored pairs need B as well")
    return DeltaSets(base, restricted, anchored)


# ---------------------------------------------------------------------------
# Exact counting oracles


def _check_subset(name: str, items: Iterable[int], n: int) -> tuple[int, ...]:
    out = tuple(sorted(set(items)))
    if out and not (0 <= out[0] and out[-1] < n):
        raise ValueError(f"{name} not within range({n})")
    return out


def oracle_delta_exact(g: GraphInstance, B: Iterable[int], x: int) -> Fraction:
    """Average anchored-pair count over all excluded sets and anchors."""
    if g.n > ORACLE_CAP:
        raise ValueError(f"exhaustive oracle capped at n <= {ORACLE_CAP}")
    bs = _check_subset("B", B, g.n)
    if not 1 <= x <= g.n:
        raise ValueError(f"x={x} out of range")
    total = 0
    count = 0
    for X in itertools.combinations(range(g.n), x):
        for w in range(g.n):
            total += len(delta_sets(g, X, bs, w).anchored or ())
            count += 1
    return Fraction(total, count)


def oracle_delta(g: GraphInstance, B: Iterable[int], x: int) -> float:
    return float(oracle_delta_exact(g, B, x))


def delta_mean_pairs(g: GraphInstance, B: Iterable[int], x: int) -> Fraction:
    """Same expectation through the per-pair decomposition.

    For an ordered pair, the anchor must be a common neighbor and the
    excluded set must miss all of them; the two events are independent.
    """
    bs = _check_subset("B", B, g.n)
    total = 0
    for u in bs:
        for v in bs:
            t = len(g.common_neighbors(u, v))
            total += t * math.comb(g.n - t, x)
    return Fraction(total, g.n * math.comb(g.n, x))


def ninter_exact(V1: Sequence[int], N: Iterable[int], x: int) -> Fraction:
    ground = tuple(sorted(set(V1)))
    if len(ground) > 12:
        raise ValueError("ground set capped at 12 elements")
    ns = set(N)
    if not ns <= set(ground):
        raise ValueError("N must sit inside V1")
    if not 1 <= x <= len(ground):
        raise ValueError(f"x={x} out of range")
    total = sum(
        len(ns & set(X)) for X in itertools.combinations(ground, x)
    )
    return Fraction(total, math.comb(len(ground), x))


def oracle_ninter(V1: Sequence[int], N: Iterable[int], x: int) -> float:
    return float(ninter_exact(V1, N, x))


def ninter_sq_exact(V1: Sequence[int], N: Iterable[int], x: int) -> Fraction:
    ground = tuple(sorted(set(V1)))
    if len(ground) > 12:
        raise ValueError("ground set capped at 12 elements")
    ns = set(N)
    if not ns <= set(ground):
        raise ValueError("N must sit inside V1")
    if not 1 <= x <= len(ground):
        raise ValueError(f"x={x} out of range")
    total = sum(
        len(ns & set(X)) ** 2 for X in itertools.combinations(ground, x)
    )
    return Fraction(total, math.comb(len(ground), x))


def oracle_ninter_sq(V1: Sequence[int], N: Iterable[int], x: int) -> float:
    return float(ninter_sq_exact(V1, N, x))


def edge_exp_exact(g: GraphInstance, x: int, y: int) -> Fraction:
    """Average directed incidence count between random vertex subsets.

    Counts pairs (edge endpoint in X, other endpoint in Y), so an edge with
    both endpoints in both sets counts twice.
    """
    n = g.n
    if n > 8:
        raise ValueError("exhaustive oracle capped at n <= 8")
    if not (1 <= x <= n and 1 <= y <= n):
        raise ValueError("subset sizes out of range")
    total = 0
    for X in itertools.combinations(range(n), x):
        xs = set(X)
        for Y in itertools.combinations(range(n), y):
            total += sum(len(g.neighbors(v) & xs) for v in Y)
    return Fraction(total, math.comb(n, x) * math.comb(n, y))


def oracle_edge_exp(g: GraphInstance, x: int, y: int) -> float:
    return float(edge_exp_exact(g, x, y))


# ---------------------------------------------------------------------------
# Build parameters


@dataclass(frozen=True)
class TriangleParams:
    x: int
    a: int
    b: int
    variant: str = "dense"

    def __post_init__(self) -> None:
        if self.variant not in ("dense", "sparse", "sparsenew"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 1 <= self.b <= self.a:
            raise ValueError("need 1 <= b <= a")
        if self.x < 1:
            raise ValueError("need x >= 1")


@dataclass
class BuildResult:
    graph: LearningGraph
    function: BooleanFunction
    variant: str
    params: dict[str, int]
    lambdas: tuple[float, ...]


def _check_build(n: int, params: TriangleParams) -> None:
    if n > BUILD_CAP:
        raise ValueError(f"materialization capped at n <= {BUILD_CAP}")
    if n < 3:
        raise ValueError("need at least 3 vertices")
    if params.a > n or params.x > n:
        raise ValueError("subset sizes exceed the vertex count")
    if params.b < 2 or params.a < 2:
        raise ValueError("both set walks need at least 2 elements")


# ---------------------------------------------------------------------------
# Direct searches for triangles meeting X


def _h_dense(n: int, X: tuple[int, ...], domain: tuple[int, ...]) -> OrResult:
    nbits = num_pairs(n)
    children = []
    for v in X:
        others = [u for u in range(n) if u != v]
        for u in others:
            for w in others:
                if w == u:
                    continue
                pos = sorted(
                    {
                        pair_position(v, u, n),
                        pair_position(v, w, n),
                        pair_position(u, w, n),
                    }
                )
                b = GraphBuilder(nbits)
                b.add_vertex("t", pos)
                b.add_super("r", "t", dense_load(nbits, pos))
                mask = sum(1 << p for p in pos)
                f = BooleanFunction(
                    nbits, {z: int(z & mask == mask) for z in domain}
                )
                children.append((b.graph(const_flow={0: 1.0}), f))
    return or_compose(children, 1, prefix="h")


def _h_sparse(n: int, X: tuple[int, ...], domain: tuple[int, ...]) -> OrResult:
    nbits = num_pairs(n)
    children = []
    for v in X:
        others = [u for u in range(n) if u != v]
        spokes = sorted(pair_position(v, u, n) for u in others)
        b = GraphBuilder(nbits)
        b.add_vertex("m", spokes)
        sl_edge = b.add_super("r", "m", sparse_load(nbits, spokes))
        branch: dict[tuple[int, ...], int] = {}
        for size in range(2, n):
            for D in itertools.combinations(others, size):
                prs = sorted(
                    pair_position(p, q, n) for p, q in itertools.combinations(D, 2)
                )
                sid = b.add_vertex(
                    "d" + ",".join(map(str, D)), sorted(set(spokes) | set(prs))
                )
                row = tuple(int(u in D) for u in others)
                ind = TableRule(tuple(spokes), {row: 1.0}, 0.0)
                if len(prs) == 1:
                    rule = ProductRule(ind, DenseLoadRule(1))
                    ei = b.add_ordinary("m", sid, prs[0], rule, rule)
                else:
                    ei = b.add_super(
                        "m", sid, dense_load(nbits, prs), w0=ind, w1=ind
                    )
                branch[D] = ei
        flows: dict[int, dict[int, float]] = {}
        values: dict[int, int] = {}
        for z in domain:
            nv = tuple(
                sorted(u for u in others if (z >> pair_position(v, u, n)) & 1)
            )
            pos = any(
                (z >> pair_position(p, q, n)) & 1
                for p, q in itertools.combinations(nv, 2)
            )
            values[z] = int(pos)
            if pos:
                flows[z] = {sl_edge: 1.0, branch[nv]: 1.0}
        children.append((b.graph(flows=flows), BooleanFunction(nbits, values)))
    return or_compose(children, 1, prefix="h")


# ---------------------------------------------------------------------------
# Walk searches for triangles avoiding X


def _eligible_configs(
    n: int, z: int, X: tuple[int, ...]
) -> Iterator[tuple[int, int, int]]:
    """Triangles (u, v, w) fully outside X whose pair (u, v) has no common
    neighbor in X; ordered by (u, v, w), u < v."""
    xs = set(X)
    for u, v in itertools.combinations(range(n), 2):
        if u in xs or v in xs:
            continue
        if not (z >> pair_position(u, v, n)) & 1:
            continue
        blocked = any(
            (z >> pair_position(t, u, n)) & 1 and (z >> pair_position(t, v, n)) & 1
            for t in xs
            if t not in (u, v)
        )
        if blocked:
            continue
        for w in range(n):
            if w in xs or w in (u, v):
                continue
            if (z >> pair_position(w, u, n)) & 1 and (
                z >> pair_position(w, v, n)
            ) & 1:
                yield (u, v, w)


def _walk_positions(n: int, X: tuple[int, ...]):
    xs = set(X)

    def positions(A: frozenset) -> set[int]:
        return {
            pair_position(t, u, n) for t in xs for u in A if t != u
        }

    return positions


def _pair_probe(
    nbits: int,
    pos_uv: int,
    required: tuple[int, int],
    blocked: tuple[tuple[int, int], ...],
    domain: tuple[int, ...],
) -> tuple[LearningGraph, BooleanFunction]:
    b = GraphBuilder(nbits)
    b.add_vertex("q", (pos_uv,))
    rule = CandidatePairRule(required, blocked)
    b.add_ordinary("r", "q", pos_uv, rule, rule)
    values = {z: int(bool((z >> pos_uv) & 1 and rule(z) > 0.0)) for z in domain}
    return b.graph(const_flow={0: 1.0}), BooleanFunction(nbits, values)


def _anchor_search(
    n: int,
    X: tuple[int, ...],
    A: tuple[int, ...],
    w: int,
    ctx: frozenset[int],
    domain: tuple[int, ...],
    b_size: int,
    kinds: Sequence[str],
) -> tuple[LearningGraph, BooleanFunction]:
    """Walk over b-subsets of A, loading adjacencies to the anchor w, then
    probe pairs of loaded vertices for a triangle with w avoiding X."""
    nbits = num_pairs(n)
    xs = set(X)

    def positions(B: frozenset) -> set[int]:
        return {
            pair_position(w, j, n) for j in B if j != w
        } - ctx

    def eligible_pairs(z: int) -> Iterator[tuple[int, int]]:
        if w in xs:
            return
        for u, v in itertools.combinations(sorted(set(A) - xs - {w}), 2):
            if not (z >> pair_position(u, v, n)) & 1:
                continue
            if not (
                (z >> pair_position(w, u, n)) & 1
                and (z >> pair_position(w, v, n)) & 1
            ):
                continue
            if any(
                (z >> pair_position(t, u, n)) & 1
                and (z >> pair_position(t, v, n)) & 1
                for t in xs
            ):
                continue
            yield (u, v)

    fn = BooleanFunction(
        nbits, {z: int(next(eligible_pairs(z), None) is not None) for z in domain}
    )

    def cert(y: int) -> tuple[int, int]:
        pair = next(eligible_pairs(y), None)
        if pair is None:
            raise CompositionError(f"no eligible pair for input {y}")
        return pair

    def factory(B: tuple[int, ...], kappa: int):
        mask = sum(1 << p for p in positions(frozenset(B)))
        sub = tuple(z for z in fn.domain if z & mask == kappa)
        cand = sorted(set(B) - xs - {w})
        children = []
        for u, v in itertools.combinations(cand, 2):
            children.append(
                _pair_probe(
                    nbits,
                    pair_position(u, v, n),
                    (pair_position(w, u, n), pair_position(w, v, n)),
                    tuple(
                        (pair_position(t, u, n), pair_position(t, v, n))
                        for t in sorted(xs)
                    ),
                    sub,
                )
            )
        if not children:
            return None
        res = or_compose(children, 1, prefix="p")
        return res.graph, res.function

    spec = JohnsonSpec(
        n_bits=nbits,
        ground=A,
        k=b_size,
        r=2,
        positions=positions,
        function=fn,
        cert=cert,
        load_kind=tuple(kinds),
        factory=factory,
        prefix="B",
    )
    res = johnson_compose(spec)
    return res.graph, res.function


def _fx(
    n: int,
    X: tuple[int, ...],
    params: TriangleParams,
    domain: tuple[int, ...],
    kinds: Sequence[str],
) -> tuple[LearningGraph, BooleanFunction]:
    nbits = num_pairs(n)
    xs = set(X)
    fn = BooleanFunction(
        nbits,
        {z: int(next(_eligible_configs(n, z, X), None) is not None) for z in domain},
    )

    def cert(y: int) -> tuple[int, int]:
        cfg = next(_eligible_configs(n, y, X), None)
        if cfg is None:
            raise CompositionError(f"no avoiding triangle for input {y}")
        return (cfg[0], cfg[1])

    walk_pos = _walk_positions(n, X)

    def factory(A: tuple[int, ...], kappa: int):
        ctx = frozenset(walk_pos(frozenset(A)))
        mask = sum(1 << p for p in ctx)
        sub = tuple(z for z in domain if z & mask == kappa)
        children = []
        for w in range(n):
            children.append(
                _anchor_search(n, X, A, w, ctx, sub, params.b, kinds)
            )
        res = or_compose(children, 1, prefix="w")
        return res.graph, res.function

    spec = JohnsonSpec(
        n_bits=nbits,
        ground=tuple(range(n)),
        k=params.a,
        r=2,
        positions=walk_pos,
        function=fn,
        cert=cert,
        load_kind=tuple(kinds),
        factory=factory,
        prefix="A",
    )
    res = johnson_compose(spec)
    return res.graph, res.function


def _build_excluded(n: int, params: TriangleParams, kind: str) -> BuildResult:
    _check_build(n, params)
    f_top = triangle_function(n)
    domain = f_top.domain
    children = []
    for X in itertools.combinations(range(n), params.x):
        if kind == DENSE:
            h = _h_dense(n, X, domain)
        else:
            h = _h_sparse(n, X, domain)
        fx_graph, fx_fn = _fx(n, X, params, domain, [kind] * 3)
        gx = or_compose(
            [(h.graph, h.function), (fx_graph, fx_fn)], 1, prefix="s"
        )
        children.append((gx.graph, gx.function))
    top = or_compose(children, math.comb(n, params.x), prefix="X")
    if top.function.values != f_top.values:
        raise CompositionError("composed function disagrees with the target")
    return BuildResult(
        graph=top.graph,
        function=BooleanFunction(f_top.n_bits, f_top.values, f_top.certs),
        variant=params.variant,
        params={"n": n, "x": params.x, "a": params.a, "b": params.b},
        lambdas=top.lambdas,
    )


def build_dense_lg(n: int, params: TriangleParams) -> BuildResult:
    return _build_excluded(n, params, DENSE)


def build_sparse_lg(n: int, params: TriangleParams) -> BuildResult:
    return _build_excluded(n, params, SPARSE)


def build_sparsenew_lg(n: int, b: int, m: int | None = None) -> BuildResult:
    if n > BUILD_CAP:
        raise ValueError(f"materialization capped at n <= {BUILD_CAP}")
    if n < 3 or not 2 <= b <= n:
        raise ValueError("need 3 <= n and 2 <= b <= n")
    if m is not None and m > 0 and b < n * n / m:
        warnings.warn(
            f"b={b} below n^2/m={n * n / m:.1f}; the cost analysis assumes "
            "denser anchor coverage",
            stacklevel=2,
        )
    f_top = triangle_function(n)
    domain = f_top.domain
    nbits = num_pairs(n)
    children = []
    for w in range(n):

        def in_triangle(z: int, w: int = w) -> bool:
            return any(w in t for t in triangles(n, z))

        fn = BooleanFunction(nbits, {z: int(in_triangle(z)) for z in domain})

        def cert(y: int, w: int = w) -> tuple[int, int]:
            for t in triangles(n, y):
                if w in t:
                    return tuple(v for v in t if v != w)  # type: ignore[return-value]
            raise CompositionError(f"no triangle through {w} in input {y}")

        def positions(B: frozenset, w: int = w) -> set[int]:
            return {pair_position(w, j, n) for j in B if j != w}

        def factory(
            B: tuple[int, ...], kappa: int, w: int = w, fn: BooleanFunction = fn
        ):
            mask = sum(1 << p for p in positions(frozenset(B)))
            sub = tuple(z for z in domain if z & mask == kappa)
            children_p = []
            for u, v in itertools.combinations(sorted(set(B) - {w}), 2):
                children_p.append(
                    _pair_probe(
                        nbits,
                        pair_position(u, v, n),
                        (pair_position(w, u, n), pair_position(w, v, n)),
                        (),
                        sub,
                    )
                )
            if not children_p:
                return None
            res = or_compose(children_p, 1, prefix="p")
            return res.graph, res.function

        spec = JohnsonSpec(
            n_bits=nbits,
            ground=tuple(range(n)),
            k=b,
            r=2,
            positions=positions,
            function=fn,
            cert=cert,
            load_kind=(SPARSE, DENSE, DENSE),
            factory=factory,
            prefix="B",
        )
        res = johnson_compose(spec)
        children.append((res.graph, res.function))
    top = or_compose(children, 3, prefix="w")
    if top.function.values != f_top.values:
        raise CompositionError("composed function disagrees with the target")
    return BuildResult(
        graph=top.graph,
        function=BooleanFunction(f_top.n_bits, f_top.values, f_top.certs),
        variant="sparsenew",
        params={"n": n, "b": b},
        lambdas=top.lambdas,
    )
