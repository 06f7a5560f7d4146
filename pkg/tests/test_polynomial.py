from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ptcoulomb.polynomial import GaussianRational, I, Polynomial

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
coeff_lists = st.lists(rationals, min_size=0, max_size=6)


def test_gaussian_rational_arithmetic():
    z = GaussianRational(1, 2)
    w = GaussianRational(Fraction(1, 3), -1)
    assert z * w == GaussianRational(Fraction(1, 3) + 2, Fraction(2, 3) - 1)
    assert I * I == -1
    assert z - z == 0
    assert complex(z.conjugate()) == 1 - 2j
    assert not GaussianRational(0, 0)


def test_ring_operations():
    V = ("x", "y")
    x = Polynomial.variable("x", V)
    y = Polynomial.variable("y", V)
    p = (x + y) ** 2
    assert p == x * x + 2 * x * y + y * y
    assert p - p == Polynomial.zero(V)
    assert p.degree("x") == 2 and p.degree() == 2
    assert str(x * 3 - y) == "3 x - y"


def test_substitute_and_derivative():
    V = ("x", "y")
    x = Polynomial.variable("x", V)
    y = Polynomial.variable("y", V)
    p = x ** 3 + 2 * x * y
    assert p.substitute("x", y + 1) == (y + 1) ** 3 + 2 * (y + 1) * y
    assert p.derivative("x") == 3 * x ** 2 + 2 * y
    assert p.derivative("y") == 2 * x


def test_variable_mismatch():
    with pytest.raises(ValueError):
        Polynomial.variable("x", ("x",)) + Polynomial.variable("y", ("y",))
    with pytest.raises(ValueError):
        Polynomial.variable("z", ("x",))


@given(coeff_lists, coeff_lists, rationals)
def test_evaluation_is_a_ring_homomorphism(a, b, t):
    p = Polynomial.from_coefficients(a)
    q = Polynomial.from_coefficients(b)
    assert (p * q).evaluate(t) == p.evaluate(t) * q.evaluate(t)
    assert (p + q).evaluate(t) == p.evaluate(t) + q.evaluate(t)


@given(coeff_lists)
def test_coefficients_round_trip(a):
    while a and a[-1] == 0:
        a = a[:-1]
    p = Polynomial.from_coefficients(a)
    assert p.coefficients() == a


@given(coeff_lists, coeff_lists)
def test_json_round_trip(a, b):
    p = Polynomial.from_coefficients(a) + I * Polynomial.from_coefficients(b)
    assert Polynomial.from_json(p.to_json()) == p


def test_float_evaluation():
    p = Polynomial.from_coefficients([Fraction(1, 2), 0, 3])
    assert p.evaluate(2.0) == pytest.approx(12.5)
    assert p.evaluate(1j) == pytest.approx(-2.5)
