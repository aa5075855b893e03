import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpzkit.phase import (
    DegenerateDenominatorError,
    RationalPhase,
    phase_at,
    phase_at_unreduced,
    phase_derivative,
    phase_gcd,
    phase_reduce,
    phase_values,
)


def test_parse_cancels_common_factors():
    f = RationalPhase.parse("(X**2 - 1)/(X - 1)")
    assert f.P == (1, 1) and f.Q == (1,)
    assert RationalPhase.parse("0").is_zero


def test_reduce_mod_p():
    f = RationalPhase.parse("X/(X + 3)")
    assert phase_reduce(f, 3) == ((1,), (1,))
    assert phase_reduce(RationalPhase.parse("3*X"), 3) == ((), (1,))
    with pytest.raises(DegenerateDenominatorError):
        phase_reduce(RationalPhase.parse("1/(5*X + 5)"), 5)


def test_reduced_and_unreduced_conventions_differ():
    # reducing first gives the constant 1; the raw pair (0, 3) is (0:0) mod 3
    f = RationalPhase.parse("X/(X + 3)")
    assert phase_at(f, 0, 3) == pytest.approx(cmath.exp(2j * math.pi / 3))
    assert phase_at_unreduced(f, 0, 3) == 1


def test_derivative():
    f = RationalPhase.parse("2*X + 3/X")
    d = phase_derivative(f)
    assert d == RationalPhase.parse("(2*X**2 - 3)/X**2")


def test_phase_gcd():
    assert phase_gcd(5, RationalPhase.parse("5*X")) == 5
    assert phase_gcd(5, RationalPhase.parse("X")) == 1
    assert phase_gcd(30, RationalPhase.parse("10*X**2")) == 10


def test_kloosterman_phase_sum():
    vals = phase_values(RationalPhase.parse("1/X + X"), 5)
    assert abs(vals.sum()) == pytest.approx(0.381966, abs=1e-6)


def test_zero_phase_is_trivial_character():
    assert np.allclose(phase_values(RationalPhase.constant(0), 21), 1)


@given(st.sampled_from([6, 7, 10, 15, 21, 35, 77]), st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 4))
def test_phase_values_match_pointwise(q, a, b, c):
    f = RationalPhase.parse(f"({a}*X + {b})/({c}*X**2 + 1)")
    table = phase_values(f, q)
    for x in range(q):
        assert table[x] == pytest.approx(phase_at(f, x, q), abs=1e-12)


@given(st.sampled_from([5, 7, 11, 13]), st.integers(-6, 6), st.integers(1, 6))
def test_unit_denominator_conventions_agree(p, a, b):
    # with no common root mod p the two conventions coincide
    f = RationalPhase.parse(f"{a}*X/(X**2 + {b})")
    for x in range(p):
        if (x * x + b) % p:
            assert phase_at(f, x, p) == pytest.approx(phase_at_unreduced(f, x, p), abs=1e-12)
