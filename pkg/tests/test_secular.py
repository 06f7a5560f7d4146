from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptcoulomb.core import ModelParams, build_Q
from ptcoulomb.secular import (char_poly_f, determinant, format_h_form, in_h_form, leading_minors,
                               reduced_secular, trailing_minors)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def leibniz_det(M):
    """Permutation expansion; the independent oracle for small sizes."""
    n = len(M)
    total = Fraction(0)
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        prod = Fraction(1)
        for i, j in enumerate(perm):
            prod *= M[i][j]
        total += sign * prod
    return total


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), small, small, small)
def test_determinant_against_leibniz(N, a, c, f):
    Q = build_Q(ModelParams(N, a, c), f)
    assert determinant(Q) == leibniz_det(Q.dense().tolist())
    assert char_poly_f(ModelParams(N, a, c)).evaluate(f) == determinant(Q)


@given(st.integers(0, 5), small, small)
def test_minors_against_leibniz(N, a, c):
    Q = build_Q(ModelParams(N, a, c), Fraction(1, 3))
    M = Q.dense().tolist()
    lead = leading_minors(Q, Fraction(1))
    trail = trailing_minors(Q, Fraction(1))
    for k in range(N + 2):
        assert lead[k] == (leibniz_det([r[:k] for r in M[:k]]) if k else 1)
        assert trail[k] == (leibniz_det([r[k:] for r in M[k:]]) if k <= N else 1)


@given(st.integers(0, 6), small, small, small)
def test_secular_depends_on_d_only(N, a, c, delta):
    p = ModelParams(N, a, c)
    q = ModelParams(N, a + delta, c - delta)
    assert char_poly_f(p) == char_poly_f(q)


def test_characteristic_polynomial_of_dense_matrix():
    p = ModelParams(4, Fraction(1, 2), Fraction(3, 2))
    coeffs = [float(x) for x in reversed(char_poly_f(p).coefficients())]
    ref = np.poly(build_Q(p.to_float()).dense())
    sign = (-1) ** (p.N + 1)
    assert np.allclose(coeffs, sign * ref, rtol=1e-9)


def test_reduced_secular_reproduces_char_poly():
    for N in range(6):
        for d in (Fraction(2), Fraction(-7, 3)):
            red = reduced_secular(N)
            poly = char_poly_f(ModelParams.from_d(N, d))
            for f in (Fraction(0), Fraction(-5, 2), Fraction(11)):
                assert red.evaluate({"X": f + (N + 2) * d, "d": d}) == poly.evaluate(f)


def test_h_form_layout():
    assert format_h_form(reduced_secular(3), 3) == "X^4 - 10 h X^2 - 48 d X + 9 h^2 - 36"
    assert format_h_form(reduced_secular(0), 0) == "-X"
    form = in_h_form(reduced_secular(4), 4)
    assert form[1] == {(2, 0): -64, (0, 0): 288}


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        reduced_secular(-1)
