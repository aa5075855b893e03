from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mpzkit.exponents import (
    LinearConstraint,
    Polygon,
    claim_sets,
    eliminate_sigma,
    load_claims,
    max_distribution_exponent,
    mpz_region,
    parse_claims,
    parse_constraint,
    region_equals,
    sigma_interval,
)

POSITIVE = [LinearConstraint(-1, 0, 0, "<", 0), LinearConstraint(0, -1, 0, "<", 0)]


def half_plane(cw, cd, rhs):
    return LinearConstraint(cw, cd, 0, "<", rhs)


@pytest.fixture(scope="module")
def full():
    return claim_sets("newtypeFull")


def test_newtype_full_regions(full):
    assert region_equals(mpz_region(full, 4), POSITIVE + [half_plane(600, 180, 7)])
    assert region_equals(mpz_region(full, 2), POSITIVE + [half_plane(280, 80, 3)])
    assert region_equals(mpz_region(full, 1), POSITIVE + [half_plane(108, 30, 1)])


def test_elementary_regions():
    cs = claim_sets("newtypeElementary")
    for i in (2, 4):
        assert region_equals(mpz_region(cs, i), POSITIVE + [half_plane(168, 48, 1)])
    assert max_distribution_exponent(cs, 2) == max_distribution_exponent(cs, 4)
    assert max_distribution_exponent(cs, 2).value == F(1, 84)


def test_region_equals_is_strict(full):
    region = mpz_region(full, 4)
    assert not region_equals(region, POSITIVE + [half_plane(600, 180, 8)])
    assert not region_equals(region, POSITIVE + [half_plane(600, 181, 7)])


def test_suprema(full):
    s = max_distribution_exponent(full, 4, "zero")
    assert (s.value, s.attained, str(s)) == (F(7, 300), False, "7/300 (open)")
    assert max_distribution_exponent(full, 4, "ray(1)").value == F(7, 390)
    assert max_distribution_exponent(full, 4, F(1)).value == F(7, 390)
    with pytest.raises(ValueError):
        max_distribution_exponent(full, 4, "sometimes")


def test_zhang_numerology():
    cs = claim_sets("zhangOriginal")
    region = mpz_region(cs, 1)
    assert region_equals(region, POSITIVE + [half_plane(828, 172, 1)])
    assert region.contains(F(1, 1168), F(1, 1168))
    assert max_distribution_exponent(cs, 1).value == F(1, 414)
    assert max_distribution_exponent(cs, 1, "ray(1)").value == F(1, 500)


def test_empty_claims():
    cs = claim_sets("empty")
    region = mpz_region(cs, 4)
    assert region.is_empty and str(region) == "empty"
    assert str(max_distribution_exponent(cs, 4)) == "empty"
    with pytest.raises(ValueError):
        claim_sets("nonsense")


def test_sigma_interval_examples(full):
    assert sigma_interval(full, 4, F(7, 600), 0) == []
    assert sigma_interval(full, 4, F(1, 100), F(1, 1000)) == [(F(1, 10), F(507, 4250))]


def check_coherence(cs, i, n):
    """Region membership and a non-empty sigma set coincide on an n x n grid of [0, 1/50]^2."""
    region = mpz_region(cs, i)
    for a in range(n + 1):
        for b in range(n + 1):
            w, d = F(a, 50 * n), F(b, 50 * n)
            assert region.contains(w, d) == bool(sigma_interval(cs, i, w, d)), (w, d)


def test_region_and_sigma_interval_agree(full):
    check_coherence(full, 4, 40)
    check_coherence(claim_sets("zhangOriginal"), 1, 20)


@pytest.mark.slow
def test_region_and_sigma_interval_agree_fine_grid(full):
    check_coherence(full, 4, 200)


@pytest.fixture(scope="module")
def full_regions(full):
    return {i: mpz_region(full, i) for i in (1, 2, 4)}


@settings(max_examples=300)
@given(w=st.fractions(0, F(1, 40)), d=st.fractions(0, F(1, 40)))
def test_multiplicity_monotone(full_regions, w, d):
    # more divisibility never hurts
    for lo, hi in ((1, 2), (2, 4)):
        if full_regions[lo].contains(w, d):
            assert full_regions[hi].contains(w, d)


def test_deligne_free_is_smaller(full):
    elem = claim_sets("newtypeElementary")
    assert max_distribution_exponent(elem, 4).value < max_distribution_exponent(full, 4).value


def test_constraint_parsing_and_printing():
    c = parse_constraint("w 54 d 15 s 5 < 1")
    assert (c.cw, c.cd, c.cs, c.rel, c.rhs) == (54, 15, 5, "<", 1)
    assert parse_constraint("cw 1/2 cd 0 cs 1 > 1/3").as_less().cw == F(-1, 2)
    assert str(LinearConstraint(F(600, 7), F(180, 7), 0, "<", 1).normalized()) == "600*varpi + 180*delta < 7"
    assert c.holds(F(1, 200), 0, F(1, 10))
    assert not c.holds(F(1, 100), 0, F(1, 10))
    with pytest.raises(ValueError):
        parse_constraint("w 1 d 2 < 3")


def test_claims_parser_errors():
    with pytest.raises(ValueError):
        parse_claims("w 1 d 0 s 0 < 1")
    with pytest.raises(ValueError):
        parse_claims("[typeVI 1]\nw 1 d 0 s 0 < 1")
    with pytest.raises(ValueError):
        parse_claims("colour = blue")


def test_load_claims_from_file(tmp_path):
    path = tmp_path / "toy.claims"
    path.write_text(
        "# toy system\n"
        "[typeI 1]\nw 40 d 10 s 0 < 1\n"
        "[typeII 1]\nw 40 d 10 s 0 < 1\n"
        "[typeIII 1]\nw 40 d 10 s 0 < 1\n"
    )
    cs = load_claims(path)
    assert cs.name == "toy" and cs.structural
    assert region_equals(mpz_region(cs, 1), POSITIVE + [half_plane(40, 10, 1)])
    assert max_distribution_exponent(cs, 1).value == F(1, 20)


def test_fourier_motzkin_projection():
    # 1/10 < s < 1/2 - w, so the projection is w < 2/5
    cons = [
        LinearConstraint(0, 0, 1, ">", F(1, 10)),
        LinearConstraint(1, 0, 1, "<", F(1, 2)),
    ]
    projected = Polygon(eliminate_sigma(cons) + POSITIVE + [half_plane(0, 1, 1)])
    assert projected.contains(F(39, 100), F(1, 2))
    assert not projected.contains(F(2, 5), F(1, 2))
