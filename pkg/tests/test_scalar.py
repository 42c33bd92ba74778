from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veechlab.scalar import FieldMismatch, Mat2, Scalar, parse_scalar, scalar_normalize, scalar_sign

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def scalars(draw, d=5):
    return Scalar(draw(rationals), draw(rationals), d)


def test_normalize_reduces_rationals():
    s = scalar_normalize(Fraction(2, 4), 0, 5)
    assert s.a == Fraction(1, 2) and s.b == 0


def test_perfect_square_folds_into_rational_part():
    s = scalar_normalize(0, Fraction(3, 3), 4)
    assert (s.a, s.b, s.d) == (2, 0, 0)
    assert float(s) == 2.0


def test_golden_ratio_square():
    phi = Scalar(Fraction(1, 2), Fraction(1, 2), 5)
    assert phi * phi == Scalar(Fraction(3, 2), Fraction(1, 2), 5)
    assert phi * phi == phi + 1


def test_negative_radicand_rejected():
    with pytest.raises(ValueError):
        Scalar(1, 1, -2)


@pytest.mark.parametrize(
    "a,b,d,expected",
    [(1, -1, 2, -1), (0, 0, 2, 0), (-3, 2, 5, 1), (3, -2, 5, -1), (2, -1, 4, 0)],
)
def test_exact_sign(a, b, d, expected):
    assert scalar_sign(Scalar(a, b, d)) == expected


def test_mixing_fields_is_an_error():
    with pytest.raises(FieldMismatch):
        Scalar(0, 1, 2) + Scalar(0, 1, 3)


def test_text_round_trip():
    for text in ["1/2", "-3", "1/2+1/2*sqrt(5)", "-1+3*sqrt(2)", "2/3-sqrt(7)", "1/2*sqrt(2)", "-sqrt(3)"]:
        s = parse_scalar(text)
        assert parse_scalar(str(s)) == s


def test_mat2_determinant_and_inverse():
    A = Mat2(2, 1, 1, 1)
    assert A.det() == 1
    assert A @ A.inverse() == Mat2.identity()


@settings(max_examples=200, deadline=None)
@given(scalars(), scalars(), scalars())
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    if x != 0:
        assert x * x.inverse() == 1


@settings(max_examples=200, deadline=None)
@given(scalars(d=2), scalars(d=2))
def test_sign_is_multiplicative(x, y):
    assert scalar_sign(x * y) == scalar_sign(x) * scalar_sign(y)


@settings(max_examples=200, deadline=None)
@given(scalars(d=3))
def test_sign_matches_float(x):
    v = float(x)
    if abs(v) > 1e-9:
        assert scalar_sign(x) == (1 if v > 0 else -1)


@given(rationals, rationals)
def test_rational_arithmetic_agrees_with_fraction(p, q):
    x, y = Scalar(p), Scalar(q)
    assert (x + y).a == p + q and (x * y).a == p * q
    assert (x < y) == (p < q)


@settings(max_examples=200, deadline=None)
@given(scalars(d=2))
def test_printed_form_parses_back(x):
    assert parse_scalar(str(x)) == x
