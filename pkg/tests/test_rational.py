from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pickleball_markov.exceptions import DomainError
from pickleball_markov.rational import (
    as_fraction,
    format_decimal,
    format_fraction,
    format_scientific,
    parse_rational,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("0.44", Fraction(11, 25)),
        ("44/100", Fraction(11, 25)),
        ("1", Fraction(1)),
        ("0", Fraction(0)),
        ("1e-3", Fraction(1, 1000)),
        (" 3/7 ", Fraction(3, 7)),
    ],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("bad", ["", "abc", "1/0", "0.4.4"])
def test_parse_rejects(bad):
    with pytest.raises(DomainError):
        parse_rational(bad)


def test_floats_are_refused():
    with pytest.raises(DomainError):
        as_fraction(0.44)


def test_format_decimal_rounds_half_even():
    assert format_decimal(Fraction(-1379512788, 10**11), 7) == "-0.0137951"
    assert format_decimal(Fraction(1, 8), 2) == "0.12"
    assert format_decimal(Fraction(3, 8), 2) == "0.38"
    assert format_decimal(Fraction(-1, 10**9), 3) == "0.000"
    assert format_decimal(Fraction(11), 2) == "11.00"


def test_format_scientific():
    assert format_scientific(Fraction(-795109, 10**14)) == "-7.95109e-09"
    assert format_scientific(Fraction(9999996, 10**7), 6) == "1.00000e+00"
    assert format_scientific(Fraction(0)) == "0.00000e+00"


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6), st.integers(0, 15))
def test_decimal_within_half_ulp(value, digits):
    text = format_decimal(value, digits)
    assert abs(Fraction(Decimal(text)) - value) <= Fraction(1, 2 * 10**digits)


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**9))
def test_fraction_string_round_trip(value):
    assert parse_rational(format_fraction(value)) == value
