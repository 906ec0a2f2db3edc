"""Fit the growth exponents of all three triangle constructions.

Prints one line per variant with the fitted slope and residual, and can dump
the per-n optimized parameters to CSV for external plotting.

    python3 scripts/fit_exponents.py --csv fits.csv --n-hi 16777216
"""

import argparse
import csv
import sys

from lgkit.costmodel import default_grid, fit_exponent, optimize_params, parse_m_law

TARGETS = {"dense": 1.25, "sparse": 7 / 6, "sparsenew": 13 / 12}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-law", default="n^1.5")
    ap.add_argument("--n-lo", type=int, default=2**10)
    ap.add_argument("--n-hi", type=int, default=2**24)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--csv", help="write per-n optimized costs here")
    args = ap.parse_args(argv)

    grid = default_grid(args.n_lo, args.n_hi, args.points)
    rows = []
    for variant in ("dense", "sparse", "sparsenew"):
        res = fit_exponent(variant, m_law=args.m_law, n_range=grid)
        drift = res.exponent - TARGETS[variant]
        extra = f" dominant={res.dominant}" if res.dominant else ""
        print(
            f"{variant:10s} slope={res.exponent:.4f} (target {TARGETS[variant]:.4f}, "
            f"drift {drift:+.4f}) residual={res.residual:.2e}{extra}"
        )
        for n, cost, corrected in res.points:
            rows.append({"variant": variant, "n": int(n), "cost": cost, "corrected": corrected})

    if args.csv:
        mf = parse_m_law(args.m_law)
        for row in rows:
            n = row["n"]
            m = mf(n)
            d2 = 2.0 * m / n if row["variant"] == "sparsenew" else None
            opt = optimize_params(row["variant"], float(n), m, d2)
            row.update({k: v for k, v in (("x", opt.x), ("a", opt.a), ("b", opt.b)) if v})
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["variant", "n", "cost", "corrected", "x", "a", "b"]
            )
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {len(rows)} rows to {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
