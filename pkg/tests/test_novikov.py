from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import clmul, from_mask, to_mask
from toric_qh.errors import CutoffError, DivisionByZero, IncompatiblePeriodGroup
from toric_qh.novikov import (
    NON_HOMOGENEOUS,
    LaurentElement,
    NovikovSeries,
    PeriodGroup,
    add,
    degree,
    invert,
    mul,
)

F = Fraction
Z = PeriodGroup([1])
TWELFTHS = PeriodGroup(["1/12"])


def S(*exps, gamma=Z, cutoff=None):
    return NovikovSeries(exps, gamma, cutoff)


exact_series = st.lists(
    st.integers(-24, 24).map(lambda i: F(i, 12)), min_size=0, max_size=6
).map(lambda e: NovikovSeries(e, TWELFTHS))
nonzero_series = exact_series.filter(lambda a: not a.is_zero())


def test_period_group():
    g = PeriodGroup(["1/2", "1/3"])
    assert g.step == F(1, 6)
    assert g.contains(F(5, 6)) and not g.contains(F(1, 12))
    assert g == PeriodGroup(["1/6"])
    assert PeriodGroup([]).contains(0) and not PeriodGroup([]).contains(1)
    with pytest.raises(ValueError):
        PeriodGroup(["-1"])


def test_exponents_must_lie_in_gamma():
    with pytest.raises(IncompatiblePeriodGroup):
        NovikovSeries(["1/2"], Z)


def test_add_examples():
    assert add(S(0, -1), S(-1)) == S(0)
    x = S(0, -3, 5)
    assert (x + x).is_zero()
    g = PeriodGroup(["1/6"])
    assert add(S("1/2", gamma=g), S("1/3", gamma=g)).exponents == {F(1, 2), F(1, 3)}


def test_add_requires_same_gamma():
    with pytest.raises(IncompatiblePeriodGroup):
        S(0) + S(0, gamma=TWELFTHS)


def test_mul_examples():
    assert mul(S(0, -1), S(0, -1)) == S(0, -2)
    assert mul(S("1/2", gamma=TWELFTHS), S("1/2", gamma=TWELFTHS)) == S(1, gamma=TWELFTHS)
    assert mul(S(0, -1), S(0, -1, -2, -3)) == S(0, -4)


def test_invert_examples():
    b = invert(S(0, -1), -3)
    assert b.exponents == {F(0), F(-1), F(-2), F(-3)} and b.cutoff == -3
    g = PeriodGroup(["1/2"])
    m = invert(S("1/2", gamma=g), -100)
    assert m.is_exact and m.exponents == {F(-1, 2)}
    a = S(1, 0, -1)
    inv = invert(a, -2)
    assert {e for e in inv.exponents if e >= -2} == {F(-1), F(-2)}
    product = a * inv
    assert product.cutoff == -2
    assert product.agrees_with(S(0), -2)


def test_invert_zero():
    with pytest.raises(DivisionByZero):
        invert(S(), -5)


def test_truncated_inputs_propagate_cutoffs():
    a = S(0, -1, -2, cutoff=-2)
    assert (a + S(3)).cutoff == -2
    assert (a * S(3)).cutoff == 1
    assert (a * a).cutoff == -2
    inv = a.invert(-10)
    assert inv.cutoff == -2  # the unknown tail of a limits the inverse
    assert (a * inv).agrees_with(S(0), -2)


def test_comparison_below_cutoff_is_an_error():
    a = S(0, -1, cutoff=-3)
    with pytest.raises(CutoffError):
        a.agrees_with(S(0, -1), -5)
    with pytest.raises(CutoffError):
        a.coefficient(-4)
    assert a.coefficient(-1) == 1 and a.coefficient(-2) == 0
    assert a == S(0, -1)


def test_serialization_round_trip():
    a = NovikovSeries(["1/2", "-1/3", 0], PeriodGroup(["1/6"]), "-2")
    token = a.to_token()
    assert token == "1/2,0,-1/3@-2"
    b = NovikovSeries.from_token(token, PeriodGroup(["1/6"]))
    assert b.exponents == a.exponents and b.cutoff == a.cutoff
    assert S().to_token() == "@exact"


@given(exact_series, exact_series)
def test_mul_matches_carryless_oracle(a, b):
    step, off = F(1, 12), 24
    expected = from_mask(clmul(to_mask(a.exponents, step, off), to_mask(b.exponents, step, off)),
                         step, 2 * off)
    assert (a * b).exponents == expected


@given(exact_series, exact_series, exact_series)
def test_ring_axioms_on_exact_elements(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(nonzero_series, nonzero_series)
def test_leading_exponent_is_additive(a, b):
    assert (a * b).leading == a.leading + b.leading


@given(nonzero_series, st.integers(-48, 0).map(lambda i: F(i, 12)))
def test_inverse_agrees_with_one_above_cutoff(a, c):
    inv = a.invert(c)
    assert (a * inv).agrees_with(NovikovSeries.one(TWELFTHS), c)


@given(nonzero_series, st.integers(-48, 0), st.integers(0, 24))
def test_truncation_soundness(a, c, slack):
    c = F(c, 12)
    coarser = c + F(slack, 12)
    one = NovikovSeries.one(TWELFTHS)
    product = a * a.invert(c)
    assert product.agrees_with(one, c)
    assert product.agrees_with(one, coarser)
    assert product.truncate(coarser).agrees_with(one, coarser)


def test_degree_examples():
    assert degree(LaurentElement.monomial(0, 1, Z, q_degree=6)) == 6
    assert degree(LaurentElement.monomial(F(5, 7), 0, PeriodGroup(["1/7"]), q_degree=6)) == 0
    qprime = LaurentElement.monomial(0, 2, Z, q_degree=-6, variable="q'")
    assert degree(qprime) == -12


def test_degree_edge_cases():
    mixed = LaurentElement.monomial(0, 1, Z, 6) + LaurentElement.monomial(0, 0, Z, 6)
    assert degree(mixed) is NON_HOMOGENEOUS
    assert degree(LaurentElement.zero(Z, 6)) is None


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(1, 5))
def test_degree_additivity(m1, m2, N):
    x = LaurentElement.monomial(-1, m1, Z, 2 * N)
    y = LaurentElement.monomial(2, m2, Z, 2 * N)
    assert degree(x * y) == degree(x) + degree(y)


def test_rename_is_an_involution():
    g = PeriodGroup([3])
    x = LaurentElement.monomial(-6, -2, g, 6) + LaurentElement.monomial(3, 1, g, 6)
    y = x.rename(3)
    assert y.variable == "q'" and y.q_degree == -6
    assert y.coeffs[2].exponents == {F(0)}
    assert y.rename(3) == x
    assert degree(LaurentElement.monomial(-6, -2, g, 6)) == degree(
        LaurentElement.monomial(-6, -2, g, 6).rename(3))


def test_laurent_units_and_tokens():
    x = LaurentElement({-2: S(-1, -3)}, Z, 6)
    assert x.is_unit()
    inv = x.inverse(-6)
    assert (x * inv).coeffs[0].agrees_with(S(0), -6)
    assert not (x + LaurentElement.one(Z, 6)).is_unit()
    with pytest.raises(DivisionByZero):
        LaurentElement.zero(Z, 6).inverse(0)
    assert LaurentElement.from_token(x.to_token(), Z, 6) == x
