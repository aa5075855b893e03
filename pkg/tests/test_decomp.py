import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from mpzkit.arith import factor, mangoldt_array, mobius_array
from mpzkit.decomp import (
    CoefficientSeq,
    classify,
    classify_exhaustive,
    classify_extended,
    convolve_many,
    dirichlet_convolve,
    discrepancy,
    heath_brown_table,
    heath_brown_terms,
    log_seq,
    mangoldt_seq,
    mobius_seq,
    ones,
    vaughan_terms,
    verify_classification,
)


def naive_convolve(a, b, limit):
    out = np.zeros(limit + 1)
    for n in range(1, limit + 1):
        out[n] = sum(a(d) * b(n // d) for d in factor(n).divisors())
    return out


@given(st.integers(0, 2**32 - 1), st.integers(1, 120))
def test_convolution_matches_divisor_sum(seed, limit):
    rng = np.random.default_rng(seed)
    a = CoefficientSeq(rng.normal(size=limit + 1))
    b = CoefficientSeq(rng.normal(size=limit + 1))
    got = dirichlet_convolve(a, b, limit).values
    assert np.allclose(got[1:], naive_convolve(a, b, limit)[1:])


def test_classical_convolutions():
    N = 2000
    # mu * 1 = delta, 1 * Lambda = log
    d = dirichlet_convolve(mobius_seq(N), ones(N), N).values
    assert d[1] == 1 and np.all(d[2:] == 0)
    assert np.allclose(dirichlet_convolve(ones(N), mangoldt_seq(N), N).values, log_seq(N).values)
    tau = convolve_many([ones(N), ones(N)], N).values
    assert tau[12] == 6 and tau[97] == 2


def test_sequence_helpers():
    s = CoefficientSeq.from_dict({2: 1.5, 5: -1})
    assert s(2) == 1.5 and s(7) == 0 and list(s.support()) == [2, 5]
    assert list((s + ones(3)).values) == [0, 1, 2.5, 1, 0, -1]
    assert list(s.restrict(3, 10).support()) == [5]
    with pytest.raises(ValueError):
        CoefficientSeq.from_dict({0: 1})


def test_mobius_truncation():
    low = mobius_seq(30, cutoff=10)
    high = mobius_seq(30, cutoff=10, above=True)
    assert np.array_equal((low + high).values, mobius_array(30).astype(float))


@given(st.integers(2, 60), st.integers(0, 200), st.integers(0, 2**32 - 1))
def test_discrepancy_oracle(q, a, seed):
    assume(math.gcd(a, q) == 1)
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=300)
    alpha = CoefficientSeq(vals)
    direct = sum(vals[n] for n in range(1, 300) if n % q == a % q)
    phi = sum(1 for r in range(1, q + 1) if math.gcd(r, q) == 1)
    avg = sum(vals[n] for n in range(1, 300) if math.gcd(n, q) == 1) / phi
    assert discrepancy(alpha, a, q) == pytest.approx(direct - avg, abs=1e-9)


def test_discrepancy_rejects_non_primitive():
    with pytest.raises(ValueError):
        discrepancy(ones(10), 2, 4)


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_heath_brown_identity(K):
    table = heath_brown_table(K, 500)
    assert table.residual.max() < 1e-6
    assert table.terms.shape == (K, table.hi - table.lo + 1)


def test_heath_brown_single_point():
    out = heath_brown_terms(3, 100, 127)
    assert out["mangoldt"] == pytest.approx(math.log(127))
    assert out["residual"] < 1e-9
    with pytest.raises(ValueError):
        heath_brown_terms(3, 100, 250)
    with pytest.raises(ValueError):
        heath_brown_table(0, 100)


@given(st.integers(1, 3000), st.floats(1.5, 30), st.floats(1.5, 30))
def test_vaughan_identity(n, U, V):
    out = vaughan_terms(U, V, n)
    expect = float(mangoldt_array(n)[n]) if n >= V else 0.0
    assert out["target"] == pytest.approx(expect)
    assert out["residual"] < 1e-9


# ---------------------------------------------------------------------------
# classifier


def random_tuple(draw_ints):
    tot = sum(draw_ints)
    return [F(v, tot) for v in draw_ints]


tuples = st.lists(st.integers(0, 40), min_size=1, max_size=8).filter(lambda v: sum(v) > 0).map(random_tuple)
sigmas = st.fractions(F(1, 10), F(1, 2), max_denominator=200).filter(lambda s: F(1, 10) < s < F(1, 2))


@given(tuples, sigmas)
def test_constructive_and_exhaustive_agree(t, s):
    fast = classify(t, s)
    slow = classify_exhaustive(t, s)
    assert fast.variant == slow.variant
    assert verify_classification(t, s, fast)


@given(tuples, st.fractions(F(1, 6), F(1, 2), max_denominator=200).filter(lambda s: F(1, 6) < s < F(1, 2)))
def test_no_type_iii_above_one_sixth(t, s):
    assert classify(t, s).variant != "TypeIII"


@given(st.fractions(F(1, 10), F(1, 6), max_denominator=300).filter(lambda s: F(1, 10) < s < F(1, 6)))
def test_type_iii_family(s):
    # (2s, 1/2 - s, 1/2 - s) has no subset sum in the open gap
    t = (2 * s, F(1, 2) - s, F(1, 2) - s)
    c = classify(t, s)
    assert c.variant == "TypeIII" and verify_classification(t, s, c)


def test_named_examples():
    s = F(3, 20)
    assert classify((F(3, 10), F(7, 20), F(7, 20)), s).variant == "TypeIII"
    s = F(2, 25)
    assert classify_extended((2 * s, 2 * s, F(1, 2) - 3 * s, F(1, 2) - s), s).variant == "TypeIV"
    assert classify_extended([F(1, 5)] * 5, s).variant == "TypeV"


def test_eight_sigma_tuple_has_a_gap_subset():
    # three copies of 2s sum to 6s, which sits strictly inside (1/2 - s, 1/2 + s) at s = 2/25
    s = F(2, 25)
    t = [2 * s] * 4 + [1 - 8 * s]
    c = classify_extended(t, s)
    assert c.variant == "TypeI_II"
    assert verify_classification(t, s, c)


def test_classifier_validation():
    with pytest.raises(ValueError):
        classify((F(1, 2), F(1, 2)), F(1, 10))
    with pytest.raises(ValueError):
        classify((F(1, 2), F(1, 3)), F(1, 5))
    with pytest.raises(ValueError):
        classify((F(3, 2), F(-1, 2)), F(1, 5))
    assert classify_exhaustive((F(1, 2), F(1, 2)), F(1, 5)).variant == "TypeI_II"
    assert classify((F(9, 10), F(1, 10)), F(1, 5)).variant == "Type0"
