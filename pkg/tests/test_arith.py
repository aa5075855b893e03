import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpzkit.arith import (
    ArithFn,
    MalformedPointError,
    NotCoprimeError,
    NotInvertibleError,
    ProjectivePoint,
    RangeError,
    arith_fn,
    crt,
    crt_factor_eval,
    divisors,
    eq_eval,
    eq_vec,
    euler_phi,
    factor,
    inverse_table,
    is_prime,
    mangoldt_array,
    mobius,
    mobius_array,
    mod_inverse,
    primes_up_to,
    projective_line_size,
    tau_k,
    von_mangoldt,
)

squarefree = st.integers(1, 3000).filter(lambda n: factor(n).squarefree)


def trial_factor(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return tuple(sorted(out.items()))


def test_factor_examples():
    assert factor(60).primes == ((2, 2), (3, 1), (5, 1))
    assert factor(1).primes == ()
    m = 2**61 - 1
    assert factor(m).primes == ((m, 1),)
    assert factor(600851475143).primes == ((71, 1), (839, 1), (1471, 1), (6857, 1))


def test_factor_range():
    with pytest.raises(RangeError):
        factor(0)
    with pytest.raises(RangeError):
        factor(2**63)


@given(st.integers(1, 10**6))
def test_factor_matches_trial_division(n):
    assert factor(n).primes == trial_factor(n)


def test_is_prime_against_sieve():
    ps = set(primes_up_to(5000))
    assert all(is_prime(n) == (n in ps) for n in range(5001))


def test_arith_functions():
    assert tau_k(12, 3) == 18
    assert euler_phi(36) == 12
    assert mobius(30) == -1 and mobius(12) == 0 and mobius(1) == 1
    assert von_mangoldt(8) == pytest.approx(math.log(2))
    assert von_mangoldt(6) == 0
    assert arith_fn("tau_3", 12) == 18
    assert arith_fn(ArithFn.EULER_PHI, 10) == 4
    assert arith_fn("vonMangoldt", 9) == pytest.approx(math.log(3))


def test_sieve_arrays_match_pointwise():
    mu = mobius_array(500)
    lam = mangoldt_array(500)
    for n in range(1, 501):
        assert mu[n] == mobius(n)
        assert lam[n] == pytest.approx(von_mangoldt(n))


@given(st.integers(1, 2000))
def test_divisor_sum_identities(n):
    ds = divisors(n)
    assert sum(euler_phi(d) for d in ds) == n
    assert sum(mobius(d) for d in ds) == (1 if n == 1 else 0)
    assert math.fsum(von_mangoldt(d) for d in ds) == pytest.approx(math.log(n), abs=1e-9)


def test_mod_inverse():
    assert mod_inverse(3, 7) == 5
    with pytest.raises(NotInvertibleError):
        mod_inverse(6, 9)
    tab = inverse_table(10)
    assert list(tab) == [0, 1, 0, 7, 0, 0, 0, 3, 0, 9]
    with pytest.raises(ValueError):
        tab[1] = 5


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17]), min_size=1, max_size=4, unique=True), st.data())
def test_crt_residues(mods, data):
    res = [data.draw(st.integers(0, m - 1)) for m in mods]
    x = crt(res, mods)
    assert all(x % m == r for r, m in zip(res, mods))
    assert 0 <= x < math.prod(mods)


def test_eq_eval_conventions():
    assert eq_eval((0, 5), 5) == 1
    assert eq_eval((1, 5), 5) == 0
    assert eq_eval(Fraction(1, 2), 5) == pytest.approx(cmath.exp(2j * math.pi * 3 / 5))
    assert eq_eval(7, 1) == 1
    # composite with a mixed infinite component: at 3 the pair is (0:0)-like, at 5 finite
    val = eq_eval((3, 3), 15)
    assert val == pytest.approx(cmath.exp(2j * math.pi * (3 * pow(3 * 3, -1, 5) % 5) / 5))


def test_eq_vec_matches_scalar():
    q = 30
    num = np.arange(-20, 40)
    den = np.arange(7, 67)
    vec = eq_vec(num, den, q)
    for a, b, v in zip(num, den, vec):
        assert v == pytest.approx(eq_eval((int(a), int(b)), q), abs=1e-12)


def test_projective_point():
    assert ProjectivePoint(2, 4, 7) == ProjectivePoint(1, 2, 7)
    assert ProjectivePoint(1, 0, 5) == ProjectivePoint(3, 0, 5)
    with pytest.raises(MalformedPointError):
        ProjectivePoint(5, 10, 15)
    assert projective_line_size(6) == 12
    pts = {ProjectivePoint(a, b, 6) for a in range(6) for b in range(6) if all(a % p or b % p for p in (2, 3))}
    assert len(pts) == projective_line_size(6)


@given(st.integers(-500, 500), st.integers(1, 500))
def test_crt_factor_eval_identity(a, b):
    q1, q2 = 7, 11
    whole, f1, f2 = crt_factor_eval((a, b), q1, q2)
    assert whole == pytest.approx(f1 * f2, abs=1e-12)


def test_crt_factor_eval_coprime():
    with pytest.raises(NotCoprimeError):
        crt_factor_eval(1, 6, 9)
