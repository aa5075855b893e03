import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpzkit.completion import (
    PeriodicFunction,
    completion_estimate,
    cutoff_decay_ratio,
    cutoff_integral,
    ft_q,
    incomplete_sum,
    make_cutoff,
    periodised_cutoff,
    reflect,
    vdc_bound,
    vdc_estimate,
)
from mpzkit.phase import RationalPhase, phase_values


def direct_ft(values):
    q = len(values)
    x = np.arange(q)
    kernel = np.exp(2j * np.pi * np.outer(x, x) / q)
    return kernel @ values / math.sqrt(q)


@given(st.integers(1, 300), st.integers(0, 2**32 - 1))
def test_ft_matches_direct_dft(q, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=q) + 1j * rng.normal(size=q)
    assert np.allclose(ft_q(f), direct_ft(f), atol=1e-9)


@given(st.integers(1, 500), st.integers(0, 2**32 - 1))
def test_ft_is_unitary_and_squares_to_reflection(q, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=q) + 1j * rng.normal(size=q)
    assert np.linalg.norm(ft_q(f)) == pytest.approx(np.linalg.norm(f))
    assert np.allclose(ft_q(ft_q(f)), reflect(f), atol=1e-9)


def test_prime_length_above_threshold():
    q = 4099
    f = np.exp(2j * np.pi * (np.arange(q) ** 2 % q) / q)
    # a quadratic Gauss sum has modulus sqrt(q) at every frequency after normalisation
    assert np.allclose(np.abs(ft_q(f)), 1.0, atol=1e-9)


def test_periodic_function_validates_length():
    with pytest.raises(ValueError):
        PeriodicFunction(5, np.ones(4))
    f = PeriodicFunction(5, np.arange(5))
    assert f(7) == 2


def test_cutoff_values_and_mass():
    c = make_cutoff(0, 100)
    assert c(50) == pytest.approx(math.exp(-4))
    assert c(0) == 0 and c(100) == 0
    assert c.mass() == pytest.approx(100 * cutoff_integral(), rel=1e-6)
    with pytest.raises(ValueError):
        make_cutoff(0, 0.5)
    with pytest.raises(ValueError):
        make_cutoff(0, 10, shape="box")


def test_cutoff_derivative_scaling():
    c = make_cutoff(3, 40)
    x = np.linspace(5, 40, 50)
    h = 1e-4
    numeric = (c(x + h) - c(x - h)) / (2 * h)
    assert np.allclose(c.derivative(1, x), numeric, atol=1e-7)


def test_incomplete_sum_congruence():
    q = 12
    f = np.arange(q, dtype=complex)
    c = make_cutoff(0, 50)
    m, w = c.weights()
    keep = m % 4 == 1
    expect = np.sum(w[keep] * f[m[keep] % q])
    assert incomplete_sum(f, c, (1, 4)) == pytest.approx(expect)
    with pytest.raises(ValueError):
        incomplete_sum(f, c, (1, 5))


@given(st.integers(2, 400), st.floats(2, 800), st.floats(-50, 50), st.integers(0, 2**32 - 1))
def test_completion_identity(q, N, x0, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=q) + 1j * rng.normal(size=q)
    rep = completion_estimate(f, make_cutoff(x0, N))
    assert rep.plancherel_residual <= 1e-9 * q


def test_constant_function_error_is_zero():
    rep = completion_estimate(np.full(17, 2.5 + 0j), make_cutoff(0.3, 120))
    assert rep.exact_error == 0


def test_periodised_cutoff_and_decay():
    c = make_cutoff(0, 60)
    per = periodised_cutoff(c, 7)
    assert per.sum() == pytest.approx(c.mass())
    assert cutoff_decay_ratio(make_cutoff(0, 40), 101) < 50


def test_vdc_bound_formula():
    assert vdc_bound(100, (4, 9)) == pytest.approx(10 * 2 + 10 * 9**0.25)
    assert vdc_bound(100, (4, 9, 16)) == pytest.approx(10 * 2 + 100**0.75 * 9**0.25 + 100**0.75 * 16**0.125)


def test_vdc_estimate_and_cauchy_schwarz():
    f = phase_values(RationalPhase.parse("1/X"), 3003)
    rep = vdc_estimate(f, make_cutoff(0, 400), 33, 91)
    assert rep.ratio < 1
    assert rep.extras["cauchy_schwarz_ok"]
    rep2 = vdc_estimate(f, make_cutoff(0, 400), 33, 91, depth=2, s_split=(7, 13))
    assert rep2.ratio < 1
    with pytest.raises(ValueError):
        vdc_estimate(f, make_cutoff(0, 400), 33, 90)
    with pytest.raises(ValueError):
        vdc_estimate(f, make_cutoff(0, 400), 33, 91, depth=2)
