"""Generate the reproducible corpus and print a content digest.

Running this twice with the same seed must print the same digest; that is
the reproducibility contract the corpus tests rely on.
"""

import argparse
import hashlib
import sys
from pathlib import Path

from lgkit.corpus import corpus_generate


def tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sizes", default="5,6,7,8,9,10")
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--p", type=float, default=0.3)
    args = ap.parse_args(argv)

    sizes = tuple(int(s) for s in args.sizes.split(","))
    manifest = corpus_generate(
        Path(args.out), seed=args.seed, sizes=sizes, samples=args.samples, p=args.p
    )
    for key in ("seed", "generator", "sizes", "samples"):
        print(f"{key}: {manifest[key]}")
    print(f"digest: {tree_digest(Path(args.out))}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
