import math
import random

import pytest
from hypothesis import given, strategies as st

from mpzkit.arith import factor, primes_up_to
from mpzkit.densediv import DenseDivQuery, ModuliInterval, dd_witness, enumerate_moduli, is_dd


def brute_dd(n, i, y):
    """Direct transcription of the definition, sweeping R over a fine set of test points."""
    if i == 0:
        return True
    divs = factor(n).divisors()
    points = {1.0, y * n}
    for d in divs:
        for v in (d, y * d):
            for eps in (-1e-7, 0.0, 1e-7):
                R = v * (1 + eps)
                if 1 <= R <= y * n:
                    points.add(R)
    for j in range(i):
        k = i - 1 - j
        for R in points:
            if not any(R / y <= r <= R and brute_dd(r, k, y) and brute_dd(n // r, j, y) for r in divs):
                return False
    return True


def test_examples():
    assert is_dd(12345, 0, 1)
    assert not is_dd(7, 1, 2)
    assert is_dd(12, 3, 3)
    assert is_dd(DenseDivQuery(30, 2, 5))
    with pytest.raises(ValueError):
        DenseDivQuery(10, 1, 0.5)


@given(st.integers(1, 400), st.integers(1, 3), st.sampled_from([1, 2, 3, 5, 7.5]))
def test_matches_brute_force(n, i, y):
    assert is_dd(n, i, y) == brute_dd(n, i, y)


def test_witness_examples():
    assert dd_witness(30, 1, 0, 0, 2, 30) == (1, 30)
    q, r = dd_witness(30, 1, 0, 0, 2, 7)
    assert q * r == 30 and 3.5 <= r <= 7
    assert dd_witness(7, 1, 0, 0, 2, 3) is None
    with pytest.raises(ValueError):
        dd_witness(30, 2, 0, 0, 2, 7)


@given(st.integers(1, 2000), st.integers(1, 3), st.sampled_from([2, 3, 4, 6]), st.data())
def test_witness_reverifies(n, i, y, data):
    if not is_dd(n, i, y):
        return
    j = data.draw(st.integers(0, i - 1))
    k = i - 1 - j
    R = data.draw(st.floats(1, y * n))
    q, r = dd_witness(n, i, j, k, y, R)
    assert q * r == n and R / y <= r <= R
    assert is_dd(r, k, y) and is_dd(q, j, y)


def test_enumeration_examples():
    vals = [fm.value for fm in enumerate_moduli(ModuliInterval(1, math.inf, 10), 1, 10)]
    assert vals == [1, 2, 3, 5, 6, 7, 10]
    assert [fm.value for fm in enumerate_moduli(ModuliInterval(1, 4, 30), mode="smooth")] == [1, 2, 3, 6]
    assert [fm.value for fm in enumerate_moduli(ModuliInterval(1, math.inf, 6), mode="allSquarefree")] == [1, 2, 3, 5, 6]
    with pytest.raises(ValueError):
        ModuliInterval(5, 5, 10)


def test_enumeration_is_exact():
    interval = ModuliInterval(2, 30, 3000)
    got = [fm.value for fm in enumerate_moduli(interval, 2, 8)]
    expect = [
        n
        for n in range(1, 3001)
        if factor(n).squarefree and all(2 < p < 30 for p in factor(n).prime_list) and is_dd(n, 2, 8)
    ]
    assert got == expect


def test_smoothness_implies_dd():
    rng = random.Random(3)
    for _ in range(300):
        y = rng.choice([2, 3, 5, 10, 30])
        ps = [p for p in primes_up_to(y)]
        n = 1
        while n < 10**4:
            n *= rng.choice(ps)
        for i in range(5):
            assert is_dd(n, i, y)
