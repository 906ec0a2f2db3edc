"""Spectral certificates extracted from a learning graph.

For each input position the witness accumulates, per expanded ordinary edge
loading that position and per agreement block (inputs equal on the edge's
tail label), two outer products: the vector holding flow over root side-1
weight on positives and root side-0 weight on negatives, split by the loaded
bit's value.  These matrices are positive semidefinite by construction, their
diagonal sums reproduce the two graph costs, and for inputs of opposite value
the entries on disagreeing positions sum to the flow crossing the agreement
cut, which is exactly 1.  Verification checks the three properties
numerically.

Fault injection (``linking_mutants``) multiplies one side-0 weight on one
reachable assignment by a constant, which bumps a crossing sum by the flow on
the mutated edge; tests use it to show the checks have teeth.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .complexity import c0_max, c1_max
from .expand import expand
from .indexing import bitstring, mask_of
from .model import BooleanFunction, LearningGraph
from .rules import PatchRule


class AdversaryError(ValueError):
    pass


def worker_count() -> int:
    raw = os.environ.get("LG_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def rebalance_to_equal(g: LearningGraph, f: BooleanFunction) -> LearningGraph:
    """Scale weights so both costs equal the graph complexity."""
    c0 = c0_max(g, f)
    c1 = c1_max(g, f)
    if c0 <= 0.0 or c1 <= 0.0:
        raise AdversaryError(f"cannot equalize costs c0={c0}, c1={c1}")
    return g.rescaled(math.sqrt(c1 / c0))


@dataclass
class Witness:
    n_bits: int
    domain: tuple[int, ...]
    row: dict[int, int]
    matrices: dict[int, np.ndarray]
    target: float  # complexity of the source graph
    blocks: int

    def matrix(self, j: int) -> np.ndarray:
        return self.matrices.get(
            j, np.zeros((len(self.domain), len(self.domain)))
        )


def build_witness(
    g: LearningGraph, f: BooleanFunction, *, cap: int = 4096
) -> Witness:
    """Assemble the per-position matrices for ``g`` against ``f``.

    Super edges are flattened first; the graph should already have equal
    costs (see :func:`rebalance_to_equal`) if the objective is to match the
    graph complexity exactly.
    """
    domain = f.domain
    if len(domain) > cap:
        raise AdversaryError(f"domain size {len(domain)} exceeds cap {cap}")
    ge = expand(g)
    row = {z: i for i, z in enumerate(domain)}
    m = len(domain)
    mats: dict[int, np.ndarray] = {}
    values = f.values
    flows = {y: ge.flow_for(y) for y in f.positives()}
    for y, fl in flows.items():
        if fl is None:
            raise AdversaryError(f"no flow recorded for positive input {y}")
    blocks = 0
    for ei, e in enumerate(ge.edges):
        if e.kind != "ordinary":
            if e.kind == "super":
                raise AdversaryError("expansion left a super edge behind")
            continue
        j = e.load
        src_mask = mask_of(ge.label(e.src))
        groups: dict[int, list[int]] = {}
        for z in domain:
            groups.setdefault(z & src_mask, []).append(z)
        mat = mats.get(j)
        if mat is None:
            mat = mats[j] = np.zeros((m, m))
        for alpha, members in groups.items():
            psi0_idx: list[int] = []
            psi0_val: list[float] = []
            psi1_idx: list[int] = []
            psi1_val: list[float] = []
            for z in members:
                zj = (z >> j) & 1
                if values[z]:
                    p = flows[z].get(ei, 0.0)
                    if p == 0.0:
                        continue
                    w = e.w1(z)
                    if w <= 0.0:
                        raise AdversaryError(
                            f"flow on zero side-1 weight, edge {ei} input {z}"
                        )
                    # positives land on the side opposite their loaded bit
                    (psi0_idx if zj == 1 else psi1_idx).append(row[z])
                    (psi0_val if zj == 1 else psi1_val).append(p / math.sqrt(w))
                else:
                    w = e.w0(z)
                    if w == 0.0:
                        continue
                    (psi0_idx if zj == 0 else psi1_idx).append(row[z])
                    (psi0_val if zj == 0 else psi1_val).append(math.sqrt(w))
            for idx, val in ((psi0_idx, psi0_val), (psi1_idx, psi1_val)):
                if not idx:
                    continue
                blocks += 1
                v = np.asarray(val)
                mat[np.ix_(idx, idx)] += np.outer(v, v)
    c0 = c0_max(g, f)
    c1 = c1_max(g, f)
    return Witness(
        n_bits=g.n_bits,
        domain=domain,
        row=row,
        matrices=mats,
        target=math.sqrt(c0 * c1),
        blocks=blocks,
    )


@dataclass
class WitnessReport:
    min_eigenvalue: float
    crossing_lo: float
    crossing_hi: float
    objective: float
    target: float
    psd_ok: bool
    crossing_ok: bool
    objective_ok: bool
    checked_pairs: int

    @property
    def ok(self) -> bool:
        return self.psd_ok and self.crossing_ok and self.objective_ok

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "min_eigenvalue": self.min_eigenvalue,
            "crossing": [self.crossing_lo, self.crossing_hi],
            "objective": self.objective,
            "target": self.target,
            "checks": {
                "psd": self.psd_ok,
                "crossing": self.crossing_ok,
                "objective": self.objective_ok,
            },
            "pairs": self.checked_pairs,
        }


def verify_witness(
    w: Witness, f: BooleanFunction, *, tol: float = 1e-9
) -> WitnessReport:
    m = len(w.domain)
    mats = list(w.matrices.items())
    threads = worker_count()
    if threads > 1 and len(mats) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            eigs = list(pool.map(lambda kv: np.linalg.eigvalsh(kv[1]), mats))
    else:
        eigs = [np.linalg.eigvalsh(mat) for _, mat in mats]
    min_eig = min((float(e[0]) for e in eigs), default=0.0)

    # crossing sums: for x negative, y positive, sum the entries of the
    # matrices at positions where the two inputs disagree
    cross = np.zeros((m, m))
    zarr = np.asarray(w.domain, dtype=np.int64)
    for j, mat in mats:
        bit = (zarr >> j) & 1
        differs = bit[:, None] != bit[None, :]
        cross += np.where(differs, mat, 0.0)
    neg_rows = [w.row[x] for x in f.negatives()]
    pos_rows = [w.row[y] for y in f.positives()]
    if neg_rows and pos_rows:
        sums = cross[np.ix_(neg_rows, pos_rows)]
        lo = float(sums.min())
        hi = float(sums.max())
    else:
        lo = hi = 1.0
    diag = np.zeros(m)
    for _, mat in mats:
        diag += np.diag(mat)
    objective = float(diag.max()) if m else 0.0
    rel = tol * max(1.0, abs(w.target))
    report = WitnessReport(
        min_eigenvalue=min_eig,
        crossing_lo=lo,
        crossing_hi=hi,
        objective=objective,
        target=w.target,
        psd_ok=min_eig >= -tol,
        crossing_ok=abs(lo - 1.0) <= tol and abs(hi - 1.0) <= tol,
        objective_ok=abs(objective - w.target) <= rel,
        checked_pairs=len(neg_rows) * len(pos_rows),
    )
    return report


@dataclass
class Mutant:
    graph: LearningGraph
    edge: int
    assignment: str
    factor: float
    flow: float  # flow of the paired positive input on the mutated edge


def linking_mutants(
    g: LearningGraph,
    f: BooleanFunction,
    count: int = 50,
    *,
    seed: int = 0,
    min_flow: float = 5e-3,
    factor: float = 4.0,
) -> list[Mutant]:
    """Graphs with the linking condition broken on one edge and assignment.

    Each mutant scales the side-0 weight by ``factor`` on one full head-label
    assignment that is shared by a flow-carrying positive input (flow at least
    ``min_flow``) and a reachable negative input disagreeing on the loaded
    bit.  The crossing sum for that input pair moves off 1 by at least
    ``flow * (sqrt(factor) - 1)``.
    """
    ge = expand(g)
    candidates: dict[tuple[int, tuple[int, ...], tuple[int, ...]], float] = {}
    negs = f.negatives()
    for ei, e in enumerate(ge.edges):
        if e.kind != "ordinary":
            continue
        j = e.load
        src_mask = mask_of(ge.label(e.src))
        dst_label = ge.label(e.dst)
        for y in f.positives():
            fl = ge.flow_for(y)
            if fl is None:
                continue
            p = fl.get(ei, 0.0)
            if p < min_flow:
                continue
            ablock = y & src_mask
            yj = (y >> j) & 1
            for x in negs:
                if x & src_mask != ablock or (x >> j) & 1 == yj:
                    continue
                if e.w0(x) <= 0.0:
                    continue
                bits = tuple((x >> i) & 1 for i in dst_label)
                key = (ei, dst_label, bits)
                candidates[key] = max(candidates.get(key, 0.0), p)
                break
    if len(candidates) < count:
        raise AdversaryError(
            f"only {len(candidates)} mutation sites available, need {count}"
        )
    order = sorted(candidates)
    random.Random(seed).shuffle(order)
    out: list[Mutant] = []
    for key in order[:count]:
        ei, dst_label, bits = key
        e = ge.edges[ei]
        patched = PatchRule(dst_label, bits, factor, e.w0)
        edges = list(ge.edges)
        edges[ei] = type(e)(e.src, e.dst, e.load, patched, e.w1)
        mg = LearningGraph(
            n_bits=ge.n_bits,
            root=ge.root,
            vertices=dict(ge.vertices),
            edges=edges,
            flows=ge.flows,
            const_flow=ge.const_flow,
            stages=ge.stages,
        )
        out.append(
            Mutant(
                graph=mg,
                edge=ei,
                assignment=",".join(
                    f"{i + 1}:{b}" for i, b in zip(dst_label, bits)
                ),
                factor=factor,
                flow=candidates[key],
            )
        )
    return out
