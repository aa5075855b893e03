import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from mpzkit import cli
from mpzkit.arith import squarefree_modulus
from mpzkit.experiments import (
    MpzExperimentConfig,
    compose_residue,
    default_grid,
    inverse_phase_closed_form,
    read_grid,
    run_bound_audit,
    run_mpz,
    run_satotate,
    st2_cdf,
    st_cdf,
)
from mpzkit.expsums import hyper_kloosterman
from mpzkit.reporting import ExperimentReport, read_config, thread_count
from mpzkit.sieve import mangoldt_interval, mangoldt_segments


def mangoldt_by_factoring(n):
    f = sympy.factorint(n)
    return math.log(next(iter(f))) if len(f) == 1 else 0.0


# ---------------------------------------------------------------------------
# sieve


def test_chebyshev_psi_against_factorisation():
    N = 10**5
    lam = mangoldt_interval(1, N)
    psi = np.cumsum(lam)
    direct = np.cumsum([mangoldt_by_factoring(n) for n in range(1, N + 1)])
    assert np.max(np.abs(psi - direct)) < 1e-6


@given(st.integers(1, 5000), st.integers(0, 3000), st.integers(1, 700))
def test_segments_are_seamless(lo, width, segment):
    hi = lo + width
    vals = mangoldt_interval(lo, hi, segment)
    assert len(vals) == hi - lo + 1
    expect = [mangoldt_by_factoring(n) if n > 1 else 0.0 for n in range(lo, hi + 1)]
    assert np.allclose(vals, expect)
    starts = [s for s, _ in mangoldt_segments(lo, hi, segment)]
    assert starts == sorted(starts) and starts[0] == lo


def test_sieve_rejects_bad_interval():
    with pytest.raises(ValueError):
        list(mangoldt_segments(0, 10))


# ---------------------------------------------------------------------------
# MPZ sweep


def direct_mpz(x, moduli, a):
    """D and T by brute force over [x, 2x]."""
    lo, hi = math.ceil(x), math.floor(2 * x)
    lam = {n: mangoldt_by_factoring(n) for n in range(lo, hi + 1)}
    D = T = 0.0
    for q in moduli:
        aq = next(r for r in range(q) if all(r % p == a % p for p in sympy.primefactors(q))) if q > 1 else 0
        cls = sum(v for n, v in lam.items() if n % q == aq)
        coprime = sum(v for n, v in lam.items() if math.gcd(n, q) == 1)
        phi = sympy.totient(q)
        D += abs(cls - coprime / phi)
        T += coprime / phi
    return D, T


def test_mpz_matches_direct_computation():
    cfg = MpzExperimentConfig(x=1000, varpi=0, delta=F(1, 10), i=1, a=1)
    rep = run_mpz(cfg)
    qs = [r["q"] for r in rep.rows]
    assert qs == sorted(qs) and qs
    D, T = direct_mpz(1000, qs, 1)
    assert rep.summary["D"] == pytest.approx(D, rel=1e-12)
    assert rep.summary["T"] == pytest.approx(T, rel=1e-12)
    assert rep.summary["ratio"] == pytest.approx(D / T)


def test_mpz_skips_non_coprime_residue():
    rep = run_mpz(MpzExperimentConfig(x=2000, a=6, mode="allSquarefree"))
    assert rep.summary["skipped_not_coprime"] > 0
    assert all(math.gcd(6, r["q"]) == 1 for r in rep.rows)


def test_mpz_empty_moduli():
    rep = run_mpz(MpzExperimentConfig(x=3))
    assert rep.summary["Q"] < 2
    assert rep.rows == [] and rep.summary["D"] == 0 and rep.summary["ratio"] == 0


def test_mpz_deterministic_across_threads(monkeypatch):
    monkeypatch.delenv("MPZKIT_THREADS", raising=False)
    base = dict(x=50000, varpi=F(1, 100), delta=F(1, 3), i=2, segment=4096)
    one = run_mpz(MpzExperimentConfig(threads=1, **base))
    four = run_mpz(MpzExperimentConfig(threads=4, **base))
    assert one.to_csv() == four.to_csv()
    assert one.summary == four.summary


def test_mpz_config_validation():
    with pytest.raises(ValueError):
        MpzExperimentConfig(x=1)
    with pytest.raises(ValueError):
        MpzExperimentConfig(x=100, varpi=-1)


@settings(max_examples=200)
@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23]), min_size=1, max_size=5, unique=True), st.data())
def test_crt_residue_composition(primes, data):
    fm = squarefree_modulus(math.prod(primes))
    a_p = {p: data.draw(st.integers(-100, 100)) for p in primes}
    aq = compose_residue(a_p, fm)
    assert 0 <= aq < fm.value
    assert all((aq - a_p[p]) % p == 0 for p in primes)


# ---------------------------------------------------------------------------
# Sato-Tate


def test_satotate_prime_angles_are_consistent():
    rep = run_satotate(1009, 1008)
    for row in rep.rows[:200]:
        kl = hyper_kloosterman(2, row["n"], 1009).real
        assert 2 * math.cos(row["theta"]) == pytest.approx(kl, abs=1e-9)
    assert rep.summary["ks_st"] < 0.06
    assert abs(rep.summary["weyl_sym1"]) < 0.1


def test_satotate_composite_angles_are_consistent():
    rep = run_satotate((11, 101), 300)
    for row in rep.rows:
        kl = hyper_kloosterman(2, row["n"], 1111).real
        assert 4 * math.cos(row["theta"]) == pytest.approx(kl, abs=1e-9)
    assert {"ks_st2", "ks_joint_product", "ks_factor_r", "ks_factor_s"} <= set(rep.summary)


def test_satotate_window_and_errors():
    with pytest.raises(ValueError):
        run_satotate((3, 10007), 50)
    with pytest.raises(ValueError):
        run_satotate(2 * 3 * 5, 10)
    with pytest.raises(ValueError):
        run_satotate(101, 0)
    # 101 lies between sqrt(10007) and twice that
    assert run_satotate((101, 10007), 20).summary["q"] == 101 * 10007


def test_sato_tate_cdfs():
    assert st_cdf(0.0) == 0 and st_cdf(math.pi) == pytest.approx(1)
    assert st_cdf(math.pi / 2) == pytest.approx(0.5)
    grid = np.linspace(0, math.pi, 50)
    assert np.all(np.diff(st2_cdf(grid)) >= 0)
    assert st2_cdf(math.pi / 2) == pytest.approx(0.5, abs=1e-3)


def test_st2_cdf_against_monte_carlo():
    rng = np.random.default_rng(11)
    # rejection sampling from (2/pi) sin^2
    t = rng.uniform(0, math.pi, size=(4, 200000))
    keep = rng.uniform(size=t.shape) < np.sin(t) ** 2
    a = t[0][keep[0]]
    b = t[1][keep[1]]
    m = min(len(a), len(b))
    sample = np.sort(np.arccos(np.cos(a[:m]) * np.cos(b[:m])))
    emp = np.arange(1, m + 1) / m
    assert np.max(np.abs(emp - st2_cdf(sample))) < 0.01


# ---------------------------------------------------------------------------
# bound audits


def test_weil_closed_form():
    for q in (7, 30, 105):
        for b in (1, 2, 5, 7, 15):
            direct = 0
            for n in range(q):
                # prime by prime: a pole contributes 0, the point (0:0) contributes 1
                val = 1.0 + 0j
                for p in sympy.primefactors(q):
                    if n % p:
                        val *= np.exp(2j * math.pi * b * pow(n * (q // p), -1, p) / p)
                    elif b % p:
                        val = 0
                direct += val
            assert inverse_phase_closed_form(b, q) == pytest.approx(direct, abs=1e-9)


@pytest.mark.parametrize("family", ["weil", "dork", "corr2", "lode", "vdc", "inctraceQ"])
def test_audit_families_run(family):
    rep = run_bound_audit(family)
    assert rep.summary["rows"] > 0 and rep.summary["skipped"] == 0
    assert all(r["ratio"] >= 0 for r in rep.rows)


def test_malformed_grid_rows_are_skipped(tmp_path):
    path = tmp_path / "grid.csv"
    path.write_text("# a comment\nf,q\n1/X,7\n1/X,7,9\n2/X,x\n3/X,30\n")
    rows, errors = read_grid(path)
    assert len(rows) == 3 and len(errors) == 1
    rep = run_bound_audit("weil", path)
    assert rep.summary["rows"] == 2
    assert rep.summary["skipped"] == 2
    with pytest.raises(ValueError):
        run_bound_audit("nope")


def test_audit_is_order_stable_across_threads():
    grid = default_grid("corr2")
    assert run_bound_audit("corr2", grid, threads=1).to_csv() == run_bound_audit("corr2", grid, threads=3).to_csv()


# ---------------------------------------------------------------------------
# reports, configs, threads


def test_report_serialisation(tmp_path):
    rep = ExperimentReport({"k": F(1, 3)}, [{"a": 1, "b": 0.1}, {"a": 2, "c": "x,y"}], {"s": 1j})
    csv_text = rep.to_csv()
    assert csv_text.splitlines() == ["a,b,c", "1,0.1,", '2,,"x,y"']
    doc = json.loads(rep.to_json())
    assert set(doc) == {"meta", "rows", "summary"}
    assert doc["meta"]["k"] == "1/3" and doc["summary"]["s"] == [0.0, 1.0]
    assert rep.write(tmp_path / "r.csv").read_text() == csv_text
    assert json.loads(rep.write(tmp_path / "r.json").read_text()) == doc


def test_read_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# header\nx = 1000   # trailing\ndelta-policy = ray(1)\n\n")
    assert read_config(path) == {"x": "1000", "delta_policy": "ray(1)"}
    path.write_text("novalue\n")
    with pytest.raises(ValueError):
        read_config(path)


def test_thread_override(monkeypatch):
    monkeypatch.setenv("MPZKIT_THREADS", "3")
    assert thread_count(1) == 3
    monkeypatch.setenv("MPZKIT_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()
    monkeypatch.delenv("MPZKIT_THREADS")
    assert thread_count(2) == 2


# ---------------------------------------------------------------------------
# command line


def test_cli_examples(capsys):
    assert cli.main(["exponents", "max", "--claims", "newtypeFull", "--i", "4", "--delta-policy", "zero"]) == 0
    assert capsys.readouterr().out.strip() == "7/300 (open)"
    assert cli.main(["densediv", "check", "--n", "7", "--i", "1", "--y", "2"]) == 0
    assert capsys.readouterr().out.strip() == "false"


def test_cli_usage_and_errors(capsys):
    assert cli.main([]) == 2
    assert "usage" in capsys.readouterr().err
    assert cli.main(["densediv", "frobnicate"]) == 2
    assert cli.main(["satotate", "--r", "3", "--s", "10007"]) == 2


def test_cli_assertion_exit_code(monkeypatch):
    def boom(*_):
        raise AssertionError("bound violated")

    monkeypatch.setattr("mpzkit.experiments.run_bound_audit", boom)
    assert cli.main(["audit", "--family", "weil"]) == 1


def test_cli_config_and_out(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("x = 500\ndelta = 1/10\n")
    out = tmp_path / "mpz.csv"
    assert cli.main(["mpz", "--x", "900", "--config", str(cfg), "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)["summary"]
    assert summary["x"] == 500
    assert out.read_text().startswith("q,a_q,omega,class_sum,expected,abs_delta")


@pytest.mark.parametrize(
    "argv",
    [
        ["sum", "ramanujan", "--b", "3", "--q", "30"],
        ["sum", "kloosterman", "--a", "1", "--b", "1", "--q", "7"],
        ["decomp", "classify", "--t", "3/10,7/20,7/20", "--sigma", "3/20"],
        ["decomp", "vaughan", "--U", "5", "--V", "5", "--n", "97"],
        ["exponents", "check", "--varpi", "1/100", "--delta", "1/1000"],
        ["complete", "--f", "1/X", "--q", "101", "--N", "50"],
        ["satotate", "--q", "101", "--exponent", "0.6"],
    ],
)
def test_cli_subcommands_succeed(argv, capsys):
    assert cli.main(argv) == 0
    assert capsys.readouterr().out.strip()
