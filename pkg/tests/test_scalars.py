"""Exact scalar arithmetic: the Gaussian rationals and the sqrt(2) field."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ncstar.scalars import (GaussianRational, I, MINUS_ONE, ONE, Q_ONE,
                            Q_SQRT2_OVER_2, Q_ZERO, QuadExact, ZERO,
                            parse_scalar, pretty_scalar, scalar)

small = st.integers(min_value=-50, max_value=50)
nonzero_den = st.integers(min_value=1, max_value=20)
gaussians = st.builds(GaussianRational, small, small, nonzero_den)


def test_normalization_and_equality():
    assert GaussianRational(2, 4, 6) == GaussianRational(1, 2, 3)
    assert GaussianRational(1, 0, -2) == GaussianRational(-1, 0, 2)
    assert hash(GaussianRational(3, 0, 3)) == hash(ONE)


def test_basic_values():
    assert (ONE + MINUS_ONE).is_zero()
    assert I * I == MINUS_ONE
    assert complex(GaussianRational(1, 1, 2)) == 0.5 + 0.5j
    assert scalar(Fraction(3, 4)).re == Fraction(3, 4)


def test_division_exact():
    x = GaussianRational(3, 5, 7)
    y = GaussianRational(-2, 1, 3)
    assert (x / y) * y == x
    with pytest.raises(ZeroDivisionError):
        x / ZERO


def test_exact_str_round_trip_examples():
    for g in (ONE, MINUS_ONE, I, GaussianRational(1, 0, 2), GaussianRational(-3, 7, 12)):
        assert parse_scalar(g.exact_str()) == g
    assert ONE.exact_str() == "1/1+0/1i"
    assert GaussianRational(1, -1, 2).exact_str() == "1/2-1/2i"


@given(gaussians, gaussians)
def test_field_commutativity(a, b):
    assert a + b == b + a
    assert a * b == b * a


@given(gaussians, gaussians, gaussians)
def test_field_distributivity(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(gaussians)
def test_conjugation_involutive(a):
    assert a.conjugate().conjugate() == a
    assert parse_scalar(a.exact_str()) == a


def test_pretty_forms():
    assert pretty_scalar(ONE) == "1"
    assert pretty_scalar(GaussianRational(-2)) == "-2"
    assert pretty_scalar(GaussianRational(1, 0, 2)) == "1/2"
    assert pretty_scalar(I) == "i"
    assert pretty_scalar(GaussianRational(0, -1)) == "-i"
    assert pretty_scalar(GaussianRational(1, 1, 2)) == "(1+1i)/2"


def test_quad_sqrt2_squares_to_half():
    half = Q_SQRT2_OVER_2 * Q_SQRT2_OVER_2
    assert half == QuadExact(Fraction(1, 2))
    assert complex(half) == 0.5 + 0j


def test_quad_complex_structure():
    i = QuadExact(0, 0, 1, 0)
    assert (i * i) == -Q_ONE
    z = QuadExact(1, 2, 3, 4)
    assert z.conjugate().conjugate() == z
    assert (z - z).is_zero()
    w = QuadExact(0, 1, 0, 0)
    assert abs(complex(w * w) - 2.0) == 0.0


def test_quad_from_gaussian():
    g = GaussianRational(1, 3, 2)
    q = QuadExact.from_gaussian(g)
    assert complex(q) == complex(g)
