"""Build the triangle graphs at a small n and report every verification step.

For each variant: materialize the graph, validate it, compute both cost
sides, then build and check the dual witness. The final table is the whole
pipeline at a glance.
"""

import argparse
import sys
import time

from lgkit.adversary import build_witness, rebalance_to_equal, verify_witness
from lgkit.complexity import complexity
from lgkit.triangle import TriangleParams, build_dense_lg, build_sparse_lg, build_sparsenew_lg
from lgkit.validate import validate


def build(variant, n, x, a, b):
    if variant == "sparsenew":
        return build_sparsenew_lg(n, b)
    params = TriangleParams(x, a, b, variant)
    maker = build_dense_lg if variant == "dense" else build_sparse_lg
    return maker(n, params)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--x", type=int, default=1)
    ap.add_argument("--a", type=int, default=2)
    ap.add_argument("--b", type=int, default=2)
    args = ap.parse_args(argv)

    header = f"{'variant':12s} {'edges':>6s} {'C0':>9s} {'C1':>7s} {'C':>8s} {'valid':>5s} {'witness':>7s} {'secs':>6s}"
    print(header)
    print("-" * len(header))
    failures = 0
    for variant in ("dense", "sparse", "sparsenew"):
        t0 = time.perf_counter()
        res = build(variant, args.n, args.x, args.a, args.b)
        ok = validate(res.graph, res.function).ok
        rep = complexity(res.graph, res.function)
        wrep = verify_witness(
            build_witness(rebalance_to_equal(res.graph, res.function), res.function),
            res.function,
        )
        dt = time.perf_counter() - t0
        failures += (not ok) + (not wrep.ok)
        print(
            f"{variant:12s} {len(res.graph.edges):6d} {rep.c0:9.2f} {rep.c1:7.4f} "
            f"{rep.value:8.4f} {'yes' if ok else 'NO':>5s} "
            f"{'yes' if wrep.ok else 'NO':>7s} {dt:6.2f}"
        )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
