"""Command line entry point: ``mpzkit <command> <action> [options]``.

Exit status is 0 on success, 1 when a checked invariant fails and 2 on
usage errors.  ``--config FILE`` reads ``key = value`` lines that override
flags given on the command line; ``--out PATH`` writes a CSV or JSON report
depending on the suffix.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .reporting import ExperimentReport, read_config


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _frac_list(text: str) -> list[Fraction]:
    return [_frac(v) for v in text.split(",") if v.strip()]


def _real(text: str) -> float | Fraction:
    """Exact rational when the text is one, else a float."""
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def _interval(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return (float(lo) if lo else 1.0, float(hi) if hi else math.inf)


def _emit(args, obj) -> None:
    """One JSON record per line, or a report written to --out."""
    if isinstance(obj, ExperimentReport):
        if args.out:
            path = obj.write(args.out)
            print(json.dumps({"written": str(path), "summary": json.loads(obj.to_json())["summary"]}))
        else:
            print(json.dumps(json.loads(obj.to_json())["summary"]))
        return
    if args.out:
        ExperimentReport(meta={"command": args.command}, rows=obj if isinstance(obj, list) else [obj]).write(args.out)
    if isinstance(obj, list):
        for rec in obj:
            print(json.dumps(rec))
    else:
        print(json.dumps(obj))


def _c(z: complex) -> dict:
    return {"re": z.real, "im": z.imag, "abs": abs(z)}


# ---------------------------------------------------------------------------
# handlers


def cmd_densediv(args) -> int:
    from .densediv import ModuliInterval, dd_witness, enumerate_moduli, is_dd

    if args.action == "check":
        _emit(args, is_dd(args.n, args.i, args.y))
    elif args.action == "witness":
        w = dd_witness(args.n, args.i, args.j, args.k, args.y, args.r)
        _emit(args, None if w is None else {"q": w[0], "r": w[1]})
    else:
        lo, hi = args.interval
        mods = enumerate_moduli(ModuliInterval(lo, hi, args.limit), args.i, args.y, args.mode)
        _emit(args, [{"q": fm.value, "primes": list(fm.prime_list)} for fm in mods])
    return 0


def cmd_sum(args) -> int:
    from . import expsums
    from .phase import RationalPhase

    if args.action == "ramanujan":
        out = {"q": args.q, "b": args.b, **_c(expsums.ramanujan(args.b, args.q))}
    elif args.action == "kloosterman":
        out = {"q": args.q, "a": args.a, "b": args.b, **_c(expsums.kloosterman2(args.a, args.b, args.q))}
    elif args.action in ("hk", "hyperkloosterman"):
        out = {"q": args.q, "m": args.m, "x": args.x, **_c(expsums.hyper_kloosterman(args.m, args.x, args.q))}
    elif args.action == "phase":
        rep = expsums.complete_phase_sum(RationalPhase.parse(args.f), args.q, args.C)
        out = rep.row()
    elif args.action in ("triple", "F"):
        out = _c(expsums.triple_sum_F(tuple(args.h), args.a, args.q))
    elif args.action == "correlation":
        out = expsums.kl_correlation(args.m, args.a, args.b, args.p, args.first_moment).row()
    elif args.action == "twovar":
        from .completion import make_cutoff

        spec = expsums.TwoVarSumSpec(
            args.m, args.alpha, args.beta, args.gamma1, args.gamma2, args.l, args.q0, args.d0, args.n0,
            make_cutoff(args.x0d, args.D), make_cutoff(args.x0n, args.N), args.y,
        )
        out = expsums.two_var_sum(spec).row()
    else:
        params = tuple(args.params)
        out = _c(expsums.kf_sum(*params, args.x, args.q, args.normalization))
    _emit(args, out)
    return 0


def cmd_audit(args) -> int:
    from .experiments import run_bound_audit

    _emit(args, run_bound_audit(args.family, args.grid, args.threads))
    return 0


def _cutoff(args):
    from .completion import make_cutoff

    return make_cutoff(args.x0, args.N, args.shape)


def cmd_complete(args) -> int:
    from .completion import completion_estimate
    from .phase import RationalPhase, phase_values

    vals = phase_values(RationalPhase.parse(args.f), args.q)
    rep = completion_estimate(vals, _cutoff(args))
    _emit(
        args,
        {
            "q": rep.q,
            "mass": rep.mass,
            "exact": _c(rep.exact_sum),
            "main": _c(rep.main_term),
            "error": _c(rep.exact_error),
            "plancherel_residual": rep.plancherel_residual,
            "sup_bound": rep.sup_bound,
            "truncated_bound": rep.truncated_bound,
        },
    )
    return 0


def cmd_vdc(args) -> int:
    from .completion import vdc_estimate
    from .phase import RationalPhase, phase_values

    vals = phase_values(RationalPhase.parse(args.f), args.r * args.s)
    split = tuple(args.split) if args.split else None
    rep = vdc_estimate(vals, _cutoff(args), args.r, args.s, args.depth, split)
    _emit(args, rep.row())
    return 0


def cmd_decomp(args) -> int:
    from . import decomp

    if args.action == "classify":
        fn = decomp.classify_extended if args.extended else decomp.classify
        c = fn(args.t, args.sigma)
        _emit(args, {"variant": c.variant, "indices": list(c.indices), "partition": c.partition, "flags": list(c.flags)})
    elif args.action == "heath-brown":
        table = decomp.heath_brown_table(args.K, args.x)
        _emit(args, {"K": args.K, "x": args.x, "max_residual": float(table.residual.max())})
    else:
        _emit(args, decomp.vaughan_terms(args.U, args.V, args.n))
    return 0


def cmd_exponents(args) -> int:
    from . import exponents as ex

    cs = ex.load_claims(args.claims_file) if args.claims_file else ex.claim_sets(args.claims)
    if args.action == "region":
        region = ex.mpz_region(cs, args.i)
        print(region)
    elif args.action == "max":
        print(ex.max_distribution_exponent(cs, args.i, args.delta_policy))
    else:
        inside = ex.mpz_region(cs, args.i).contains(args.varpi, args.delta)
        sig = ex.sigma_interval(cs, args.i, args.varpi, args.delta)
        _emit(args, {"inside": inside, "sigma": [[str(a), str(b)] for a, b in sig]})
    return 0


def cmd_mpz(args) -> int:
    from .experiments import MpzExperimentConfig, run_mpz

    cfg = MpzExperimentConfig(
        x=args.x,
        varpi=args.varpi,
        delta=args.delta,
        i=args.i,
        a=args.a,
        mode=args.mode,
        interval=args.interval,
        A_list=tuple(args.A),
        exclude_exceptional=args.exclude_exceptional,
        threads=args.threads,
        out=args.out,
    )
    _emit(args, run_mpz(cfg))
    return 0


def cmd_satotate(args) -> int:
    from .experiments import run_satotate

    if args.q is not None:
        q = args.q
    elif args.r is not None and args.s is not None:
        q = (args.r, args.s)
    else:
        raise ValueError("give --q, or both --r and --s")
    n = q if isinstance(q, int) else q[0] * q[1]
    limit = args.limit if args.limit is not None else math.ceil(n ** args.exponent)
    _emit(args, run_satotate(q, min(limit, n)))
    return 0


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file overriding flags")
    p.add_argument("--out", help="write a report (.csv or .json)")


def _cutoff_args(p) -> None:
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--shape", default="bump")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpzkit", description="Exponential sums, dense divisibility and MPZ numerology.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("densediv", help="dense divisibility")
    dsub = p.add_subparsers(dest="action", required=True)
    q = dsub.add_parser("check")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--i", type=int, required=True)
    q.add_argument("--y", type=_real, required=True)
    q = dsub.add_parser("witness")
    for name in ("n", "i", "j", "k"):
        q.add_argument(f"--{name}", type=int, required=True)
    q.add_argument("--y", type=_real, required=True)
    q.add_argument("--r", type=_real, required=True, help="the target R")
    q = dsub.add_parser("enum")
    q.add_argument("--limit", type=int, required=True)
    q.add_argument("--mode", default="denselyDivisible", choices=["denselyDivisible", "smooth", "allSquarefree"])
    q.add_argument("--i", type=int, default=1)
    q.add_argument("--y", type=_real)
    q.add_argument("--interval", type=_interval, default=(1.0, math.inf), help="LO:HI")
    for q in dsub.choices.values():
        _common(q)
    p.set_defaults(func=cmd_densediv)

    p = sub.add_parser("sum", help="complete exponential sums")
    ssub = p.add_subparsers(dest="action", required=True)
    q = ssub.add_parser("ramanujan")
    q.add_argument("--b", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q = ssub.add_parser("kloosterman")
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--b", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q = ssub.add_parser("hk", aliases=["hyperkloosterman"])
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--x", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q = ssub.add_parser("phase")
    q.add_argument("--f", required=True, help="rational function of X, e.g. '1/X + X'")
    q.add_argument("--q", type=int, required=True)
    q.add_argument("--C", type=float, default=10.0)
    q = ssub.add_parser("triple", aliases=["F"])
    q.add_argument("--h", type=int, nargs=3, required=True)
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q = ssub.add_parser("kf")
    q.add_argument("--params", type=int, nargs=5, required=True, metavar=("A", "B", "C", "D", "E"))
    q.add_argument("--x", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q.add_argument("--normalization", default="paperMinus", choices=["paperMinus", "corollaryPlus"])
    q = ssub.add_parser("correlation")
    q.add_argument("--m", type=int, default=3)
    q.add_argument("--a", type=int, required=True)
    q.add_argument("--b", type=int, required=True)
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--first-moment", action="store_true")
    q = ssub.add_parser("twovar")
    for name in ("m", "alpha", "beta", "gamma1", "gamma2", "l"):
        q.add_argument(f"--{name}", type=int, required=True)
    for name in ("q0",):
        q.add_argument(f"--{name}", type=int, default=1)
    for name in ("d0", "n0"):
        q.add_argument(f"--{name}", type=int, default=0)
    q.add_argument("--D", type=float, required=True)
    q.add_argument("--N", type=float, required=True)
    q.add_argument("--x0d", type=float, default=0.0)
    q.add_argument("--x0n", type=float, default=0.0)
    q.add_argument("--y", type=float, default=1.0)
    for q in set(ssub.choices.values()):
        _common(q)
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("audit", help="bound audits")
    p.add_argument("--family", required=True, choices=["weil", "dork", "kls", "corr2", "lode", "vdc", "inctraceQ"])
    p.add_argument("--grid", help="CSV grid; the built-in grid when omitted")
    p.add_argument("--threads", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("complete", help="completion of an incomplete phase sum")
    p.add_argument("--f", required=True)
    p.add_argument("--q", type=int, required=True)
    _cutoff_args(p)
    _common(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("vdc", help="van der Corput estimate")
    p.add_argument("--f", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--depth", type=int, default=1, choices=[1, 2])
    p.add_argument("--split", type=int, nargs=2, metavar=("R2", "R3"))
    _cutoff_args(p)
    _common(p)
    p.set_defaults(func=cmd_vdc)

    p = sub.add_parser("decomp", help="combinatorial decompositions")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("classify")
    q.add_argument("--t", type=_frac_list, required=True, help="comma separated rationals")
    q.add_argument("--sigma", type=_frac, required=True)
    q.add_argument("--extended", action="store_true", help="allow Type IV and V")
    q = csub.add_parser("heath-brown")
    q.add_argument("--K", type=int, required=True)
    q.add_argument("--x", type=float, required=True)
    q = csub.add_parser("vaughan")
    q.add_argument("--U", type=float, required=True)
    q.add_argument("--V", type=float, required=True)
    q.add_argument("--n", type=int, required=True)
    for q in csub.choices.values():
        _common(q)
    p.set_defaults(func=cmd_decomp)

    p = sub.add_parser("exponents", help="exponent regions and suprema")
    esub = p.add_subparsers(dest="action", required=True)
    for name in ("region", "max", "check"):
        q = esub.add_parser(name)
        q.add_argument("--claims", default="newtypeFull", choices=["newtypeFull", "newtypeElementary", "zhangOriginal"])
        q.add_argument("--claims-file", help="claims file used instead of --claims")
        q.add_argument("--i", type=int, default=4)
        _common(q)
    esub.choices["max"].add_argument("--delta-policy", default="zero", help="zero or ray(c)")
    esub.choices["check"].add_argument("--varpi", type=_frac, required=True)
    esub.choices["check"].add_argument("--delta", type=_frac, required=True)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("mpz", help="MPZ discrepancy sweep")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--varpi", type=_frac, default=Fraction(0))
    p.add_argument("--delta", type=_frac, default=Fraction(1, 4))
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--mode", default="denselyDivisible", choices=["denselyDivisible", "smooth", "allSquarefree"])
    p.add_argument("--interval", type=_interval, default=(1.0, math.inf), help="LO:HI")
    p.add_argument("--A", type=float, nargs="+", default=[1.0, 2.0])
    p.add_argument("--exclude-exceptional", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_mpz)

    p = sub.add_parser("satotate", help="Kloosterman angle statistics")
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--exponent", type=float, default=1.0, help="limit = ceil(q^exponent) when --limit is absent")
    _common(p)
    p.set_defaults(func=cmd_satotate)
    return parser


def _config_argv(argv: list[str]) -> list[str]:
    """Append the entries of any --config file as flags, so that they win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    extra: list[str] = []
    for key, value in read_config(argv[idx + 1]).items():
        flag = "--" + key.replace("_", "-")
        low = value.lower()
        if low in ("true", "false"):
            if low == "true":
                extra.append(flag)
            continue
        extra.append(flag)
        extra.extend(value.split())
    return argv + extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(_config_argv(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        print(f"mpzkit: error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except AssertionError as exc:
        print(f"mpzkit: check failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"mpzkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
