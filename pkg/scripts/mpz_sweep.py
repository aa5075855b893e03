"""D(x)/T(x) for a list of x at fixed (varpi, delta, i, a).

Per-modulus tables go to <out>/mpz_x<x>.csv and the summaries to <out>/mpz_summary.csv.
"""

import argparse
from fractions import Fraction
from pathlib import Path

from mpzkit.experiments import MpzExperimentConfig, run_mpz
from mpzkit.reporting import ExperimentReport


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=float, nargs="+", default=[1e4, 1e5, 3e5])
    ap.add_argument("--varpi", type=Fraction, default=Fraction(0))
    ap.add_argument("--delta", type=Fraction, default=Fraction(1, 4))
    ap.add_argument("--i", type=int, default=1)
    ap.add_argument("--a", type=int, default=1)
    ap.add_argument("--mode", default="denselyDivisible")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/mpz")
    args = ap.parse_args()
    out = Path(args.out)
    rows = []
    for x in args.x:
        cfg = MpzExperimentConfig(x=x, varpi=args.varpi, delta=args.delta, i=args.i, a=args.a, mode=args.mode, threads=args.threads)
        rep = run_mpz(cfg)
        rep.write(out / f"mpz_x{int(x)}.csv")
        row = {k: rep.summary[k] for k in ("x", "Q", "moduli", "D", "T", "ratio")}
        row["seconds"] = round(rep.meta["seconds"], 3)
        rows.append(row)
        print(row)
    meta = {"varpi": args.varpi, "delta": args.delta, "i": args.i, "a": args.a, "mode": args.mode}
    ExperimentReport(meta, rows).write(out / "mpz_summary.csv")


if __name__ == "__main__":
    main()
