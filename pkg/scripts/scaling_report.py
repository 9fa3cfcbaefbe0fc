#!/usr/bin/env python3
"""Wall-clock scaling sweep.

Runs the benchmark stages over a list of dataset sizes (doubling by default)
and reports per-stage wall times plus the total growth ratio between
consecutive sizes.
"""

import argparse
import json
import sys

from embtrace.bench import run_bench


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sizes", default="10000,20000,40000", help="comma-separated point counts"
    )
    parser.add_argument("--d", type=int, default=50, help="source-space dimensionality")
    parser.add_argument("--embeddings", type=int, default=5)
    parser.add_argument("--k", type=int, default=50)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--json", action="store_true", help="one JSON report per size")
    args = parser.parse_args()

    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    previous = None
    for n in sizes:
        report = run_bench(n, args.d, args.embeddings, args.k, seed=args.seed)
        if args.json:
            print(json.dumps(report.to_dict()), flush=True)
        else:
            stages = "  ".join(f"{name}={t:.1f}s" for name, t in report.stages.items())
            ratio = "" if previous is None else f"  x{report.total / previous:.2f}"
            print(f"n={n:>7}  total={report.total:.1f}s{ratio}  {stages}", flush=True)
        previous = report.total
    return 0


if __name__ == "__main__":
    sys.exit(main())
