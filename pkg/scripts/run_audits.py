"""Run every bound audit over its grid file and write one CSV per family."""

import argparse
import json
from pathlib import Path

from mpzkit.experiments import AUDITS, run_bound_audit

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", default=str(HERE / "grids"))
    ap.add_argument("--out", default="results/audits")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--family", action="append", choices=sorted(AUDITS), help="repeatable; default all")
    args = ap.parse_args()
    for family in args.family or sorted(AUDITS):
        grid = Path(args.grids) / f"{family}.csv"
        rep = run_bound_audit(family, grid if grid.exists() else None, args.threads)
        path = rep.write(Path(args.out) / f"{family}.csv")
        print(json.dumps({**rep.summary, "csv": str(path), "errors": rep.meta["errors"]}))


if __name__ == "__main__":
    main()
