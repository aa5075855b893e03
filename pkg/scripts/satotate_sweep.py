"""Kloosterman angle statistics for a few moduli and ranges."""

import argparse
import math
from pathlib import Path

from mpzkit.experiments import run_satotate
from mpzkit.reporting import ExperimentReport


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=10007)
    ap.add_argument("--r", type=int, default=101)
    ap.add_argument("--s", type=int, default=10007)
    ap.add_argument("--out", default="results/satotate")
    args = ap.parse_args()
    out = Path(args.out)
    runs = [
        (f"p{args.p}_full", args.p, args.p - 1),
        (f"p{args.p}_short", args.p, math.ceil(args.p**0.6)),
        (f"rs{args.r}x{args.s}", (args.r, args.s), math.ceil((args.r * args.s) ** 0.37)),
    ]
    rows = []
    for name, q, limit in runs:
        rep = run_satotate(q, limit)
        rep.write(out / f"{name}.csv")
        rows.append({"run": name, **rep.summary})
        print(rows[-1])
    ExperimentReport({"runs": [r[0] for r in runs]}, rows).write(out / "summary.csv")


if __name__ == "__main__":
    main()
