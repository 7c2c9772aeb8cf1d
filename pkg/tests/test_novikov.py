from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from floerlab.novikov import (
    INF,
    ONE,
    ZERO,
    NovikovScalar,
    exponent,
    format_scalar,
    parse_scalar,
)

from strategies import nonzero_scalars, quarter, scalars


def T(*exps):
    return NovikovScalar(exps)


def test_addition_cancels_mod_two():
    assert T(0, 1) + T(1, 2) == T(0, 2)
    assert T(F(1, 2)) + ZERO == T(F(1, 2))


def test_products():
    assert T(0, 1) * T(0, 1) == T(0, 2)
    assert T(F(1, 2)) * T(F(3, 2)) == T(2)
    assert ZERO * T(0, 5) == ZERO


def test_monomial_inverse_is_exact():
    inv = T(1).inverse(7)
    assert inv.terms == (-1,)


def test_geometric_series_inverse():
    inv = T(0, F(1, 2)).inverse(2)
    assert inv.terms == (0, F(1, 2), 1, F(3, 2))


def test_valuation():
    assert T(F(1, 2), 3).valuation() == F(1, 2)
    assert ZERO.valuation() == INF


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse(1)


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        exponent(0.5)


@pytest.mark.parametrize("text", ["0", "1", "1+t^{1/2}", "t^{-3/4}+t^{2}", "1+O(t^{3})"])
def test_text_round_trip(text):
    assert format_scalar(parse_scalar(text)) == text


def test_bad_token():
    with pytest.raises(ValueError):
        parse_scalar("1+x")


def test_window_truncates_products():
    x = NovikovScalar((0, 1), window=2)
    y = T(F(1, 2))
    assert (x * y).window == F(5, 2)


@given(scalars, scalars, scalars)
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x + x == ZERO
    assert x * ONE == x


@given(nonzero_scalars, nonzero_scalars)
def test_valuation_is_additive(x, y):
    assert (x * y).valuation() == x.valuation() + y.valuation()


@given(scalars, scalars)
def test_valuation_ultrametric(x, y):
    assert (x + y).valuation() >= min(x.valuation(), y.valuation())


@given(nonzero_scalars, st.integers(1, 12).map(lambda n: F(n, 2)))
def test_inverse_agrees_with_one_below_window(x, w):
    prod = x * x.inverse(w)
    assert [a for a in prod.terms if a < w] == [0]


@given(scalars, quarter)
def test_shift_is_monomial_product(x, a):
    assert x.shift(a) == x * NovikovScalar.monomial(a)


@given(scalars)
def test_format_parse_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x
