"""Write the parameter grids used by run_audits.py into scripts/grids/."""

import argparse
import csv
import random
from pathlib import Path

from mpzkit.arith import factor, primes_up_to


def squarefree(lo, hi, odd=True):
    return [m for m in range(lo, hi + 1) if factor(m).squarefree and (m % 2 or not odd)]


def grids(seed):
    rng = random.Random(seed)
    out = {}
    out["weil"] = [{"f": f"{b}/X", "q": q} for q in (7, 30, 77, 105, 210, 1155) for b in (1, 2, 3, 7, 11)]
    out["weil"] += [{"f": f, "q": q} for f in ("X + 1/X", "X**2 + 1/X", "1/(X**2 + 1)") for q in (101, 1001, 2310)]
    out["kls"] = [{"p": p, "m": 3} for p in primes_up_to(499)]
    out["lode"] = [
        {"m": m, "alpha": 1, "beta": rng.randrange(1, m), "gamma1": 0, "gamma2": 1, "l": rng.randrange(1, 5),
         "q0": 1, "D": D, "N": N, "x0d": 1, "x0n": 1, "prefactor": 50}
        for m in sorted(rng.sample(squarefree(15, 2000), 24))
        for D, N in ((20, 60), (50, 150))
    ]
    out["vdc"] = [
        {"r": r, "s": s, "N": N, "f": f}
        for r, s in ((33, 91), (35, 143), (39, 385))
        for N in (200, 800)
        for f in ("1/X", "X + 1/X")
    ] + [{"r": 33, "s": 91, "N": N, "depth": 2, "r2": 7, "r3": 13, "f": "1/X"} for N in (200, 800)]
    out["inctraceQ"] = [
        {"a": 1, "b": 2, "c": 3, "d": 4, "e": e, "q": q, "r": r, "N": N, "x0": 3}
        for q, r in ((97, 1), (1009, 1), (1001, 7), (3003, 33))
        for e in (0, 5)
        for N in (50, 400)
        if N <= q
    ]
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).parent / "grids"))
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    for name, rows in grids(args.seed).items():
        cols = list(dict.fromkeys(k for r in rows for k in r))
        path = Path(args.out) / f"{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, cols, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        print(f"{path}: {len(rows)} rows")


if __name__ == "__main__":
    main()
