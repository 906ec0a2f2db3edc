"""Cost evaluation.

The negative cost of a graph at an input sums the side-0 weights of all edges.
The positive cost at an input sums flow squared over side-1 weight along the
committed flow, with the convention that zero flow contributes zero.  A super
edge contributes its host weight times the inner negative cost on side 0, and
flow squared times the inner positive cost over the host weight on side 1.

``complexity`` aggregates both over a function's domain and reports per-stage
breakdowns when the graph carries stage metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from .indexing import bitstring
from .model import BooleanFunction, Edge, LearningGraph, StageInfo


class ComplexityError(ValueError):
    pass


class MissingFlowError(ComplexityError):
    pass


def edge_c0(g: LearningGraph, e: Edge, z: int) -> float:
    if e.kind == "empty":
        return 0.0
    if e.gadget is None:
        return e.w0(z)
    host = e.w0(z)
    if host == 0.0:
        return 0.0
    return host * graph_c0(e.gadget.inner, z)


def graph_c0(g: LearningGraph, z: int) -> float:
    # fsum keeps repeated equal prices exact (a dense path must cost K^2)
    return math.fsum(edge_c0(g, e, z) for e in g.edges)


def edge_c1(g: LearningGraph, e: Edge, p: float, y: int) -> float:
    if p == 0.0:
        return 0.0
    if p < 0.0:
        raise ComplexityError(f"negative flow {p} on edge {e.src}->{e.dst}")
    if e.kind == "empty":
        raise ComplexityError(
            f"flow {p} on empty transition {e.src}->{e.dst} at input {y}"
        )
    w = e.w1(y)
    if w == 0.0:
        raise ComplexityError(
            f"flow {p} on zero side-1 weight {e.src}->{e.dst} at input {y}"
        )
    if e.gadget is None:
        return p * p / w
    return p * p * graph_c1(e.gadget.inner, y) / w


def graph_c1(g: LearningGraph, y: int, flow: dict[int, float] | None = None) -> float:
    if flow is None:
        flow = g.flow_for(y)
    if flow is None:
        raise MissingFlowError(f"no flow recorded for input {y}")
    return math.fsum(edge_c1(g, g.edges[i], p, y) for i, p in flow.items())


def c0_max(g: LearningGraph, f: BooleanFunction) -> float:
    xs = f.negatives()
    return max((graph_c0(g, x) for x in xs), default=0.0)


def c1_max(g: LearningGraph, f: BooleanFunction) -> float:
    ys = f.positives()
    return max((graph_c1(g, y) for y in ys), default=0.0)


def _cost_entry(
    name: str,
    c0: float,
    c1: float,
    per0: dict[int, float],
    per1: dict[int, float],
    n_bits: int,
) -> dict[str, Any]:
    return {
        "name": name,
        "c0_max": c0,
        "c1_max": c1,
        "c": math.sqrt(c0 * c1),
        "per_input": {
            "c0": {bitstring(z, n_bits): v for z, v in sorted(per0.items())},
            "c1": {bitstring(z, n_bits): v for z, v in sorted(per1.items())},
        },
    }


@dataclass
class StageCost:
    name: str
    c0: float
    c1: float
    per_input_c0: dict[int, float] = field(default_factory=dict)
    per_input_c1: dict[int, float] = field(default_factory=dict)
    # totals with any recorded rebalance factors divided back out
    raw_c0: float | None = None
    raw_c1: float | None = None


@dataclass
class ComplexityReport:
    c0: float
    c1: float
    n_bits: int
    per_input_c0: dict[int, float] = field(default_factory=dict)
    per_input_c1: dict[int, float] = field(default_factory=dict)
    stages: list[StageCost] = field(default_factory=list)

    @property
    def value(self) -> float:
        return math.sqrt(self.c0 * self.c1)

    def to_json(self) -> dict[str, Any]:
        stages = []
        for s in self.stages:
            entry = _cost_entry(
                s.name, s.c0, s.c1, s.per_input_c0, s.per_input_c1, self.n_bits
            )
            if s.raw_c0 is not None:
                entry["raw"] = {"c0_max": s.raw_c0, "c1_max": s.raw_c1}
            stages.append(entry)
        return {
            "stages": stages,
            "total": _cost_entry(
                "total",
                self.c0,
                self.c1,
                self.per_input_c0,
                self.per_input_c1,
                self.n_bits,
            ),
        }


def complexity(
    g: LearningGraph,
    f: BooleanFunction,
    stages: Iterable[StageInfo] | None = None,
) -> ComplexityReport:
    """Evaluate both costs of ``g`` against ``f`` over its whole domain."""
    if stages is None:
        stages = g.stages or ()
    stage_list = list(stages)
    per0 = {x: graph_c0(g, x) for x in f.negatives()}
    per1 = {y: graph_c1(g, y) for y in f.positives()}
    report = ComplexityReport(
        c0=max(per0.values(), default=0.0),
        c1=max(per1.values(), default=0.0),
        n_bits=g.n_bits,
        per_input_c0=per0,
        per_input_c1=per1,
    )
    for st in stage_list:
        edge_ids = set(st.edges)
        factors = dict(st.rebalance or {})
        stage_per0: dict[int, float] = {}
        stage_per1: dict[int, float] = {}
        raw0 = 0.0 if factors else None
        raw1 = 0.0 if factors else None
        for x in f.negatives():
            parts = [(i, edge_c0(g, g.edges[i], x)) for i in st.edges]
            stage_per0[x] = math.fsum(v for _, v in parts)
            if factors:
                # side-0 contributions were multiplied by the factor
                raw0 = max(
                    raw0,
                    math.fsum(
                        v / factors[i] if factors.get(i) else v for i, v in parts
                    ),
                )
        for y in f.positives():
            flow = g.flow_for(y)
            if flow is None:
                raise MissingFlowError(f"no flow recorded for input {y}")
            parts = [
                (i, edge_c1(g, g.edges[i], p, y))
                for i, p in flow.items()
                if i in edge_ids
            ]
            stage_per1[y] = math.fsum(v for _, v in parts)
            if factors:
                # side-1 contributions were divided by the factor
                raw1 = max(
                    raw1,
                    math.fsum(
                        v * factors[i] if factors.get(i) else v for i, v in parts
                    ),
                )
        report.stages.append(
            StageCost(
                st.name,
                max(stage_per0.values(), default=0.0),
                max(stage_per1.values(), default=0.0),
                stage_per0,
                stage_per1,
                raw0,
                raw1,
            )
        )
    return report
