from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptcoulomb.core import (DomainError, ModelParams, build_Q, energy, is_exact,
                            recurrence_coefficients)

small = st.fractions(min_value=-6, max_value=6, max_denominator=8)


def test_small_matrix_by_hand():
    # N = 1, a = 0, c = 1
    Q = build_Q(ModelParams(1, 0, 1))
    assert Q.dense().tolist() == [[-4, 2], [-2, -2]]


def test_coefficients_row_zero():
    p = ModelParams(3, Fraction(1, 2), 2)
    A, B, C, D = recurrence_coefficients(p, Fraction(-7), 0)
    assert A == -8
    assert B == -1 - 16 + 7
    assert C == 1 * (2 - 2)
    assert D == 4


def test_row_range_checked():
    with pytest.raises(DomainError):
        recurrence_coefficients(ModelParams(2), 0, 3)


@pytest.mark.parametrize("bad", [dict(N=-1), dict(N=1.5), dict(N=True), dict(N=1, a=1j)])
def test_params_domain(bad):
    with pytest.raises(DomainError):
        ModelParams(**bad)


def test_lambda_requires_nonzero_c():
    with pytest.raises(DomainError):
        ModelParams(2, 1, 0).lam
    assert ModelParams.from_lambda(2, Fraction(1, 4)).c == 4


def test_energy():
    assert energy(ModelParams(2, 0, 4)) == 7
    assert energy(ModelParams(1, Fraction(1, 2), 1)) == Fraction(5) + Fraction(1, 4)


def test_exactness_tracking():
    assert build_Q(ModelParams(2, 0, Fraction(5, 2)), Fraction(-1)).exact
    assert not build_Q(ModelParams(2, 0, 2.5)).exact
    assert is_exact(1, Fraction(2)) and not is_exact(1.0) and not is_exact(True)


@given(st.integers(0, 6), small, small, small)
def test_band_layout_matches_dense(N, a, c, f):
    Q = build_Q(ModelParams(N, a, c), f)
    M = Q.dense()
    for i in range(N + 1):
        for j in range(N + 1):
            assert M[i, j] == Q.entry(i, j)
            if j < i - 1 or j > i + 2:
                assert M[i, j] == 0
    v = [Fraction(k + 1, 3) for k in range(N + 1)]
    assert Q.matvec(v) == list(M.dot(np.array(v, dtype=object)))
    assert Q.vecmat(v) == list(np.array(v, dtype=object).dot(M))


@given(st.integers(0, 5), small, small)
def test_shifted_is_minus_identity(N, c, f):
    Q = build_Q(ModelParams(N, 0, c))
    assert (Q.shifted(f).dense() == build_Q(ModelParams(N, 0, c), f).dense()).all()
