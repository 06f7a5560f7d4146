"""Acceptance suite: one block per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints a
PASS/FAIL line for every criterion.
"""

import random
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from ptcoulomb.core import ModelParams, build_Q
from ptcoulomb.perturb import overlap_matrix, rs_corrections, unperturbed_spectrum
from ptcoulomb.secular import TABLE1, char_poly_f, reduced_secular, table1_check
from ptcoulomb.spectra import (asymptotic_charges, critical_d, eigencharges, match_multisets,
                               refine_charges, secular_roots)
from ptcoulomb.sturmian import ode_residual, right_coefficients, sturmian
from ptcoulomb.verify import (ode_shoot_refined, recurrence_operator, shift_invariance_check,
                              sl2_commutator_check)


def crit(number, title):
    return pytest.mark.criterion(number, title)


def mp_fraction(z, digits=45):
    return Fraction(mpmath.nstr(mpmath.re(z), digits))


# 1 ---------------------------------------------------------------------------

@crit(1, "reference secular polynomials N = 0..5, exact, < 1 s")
def test_table1_golden():
    start = time.perf_counter()
    rows = table1_check()
    elapsed = time.perf_counter() - start
    assert [r.N for r in rows] == [0, 1, 2, 3, 4, 5]
    for row in rows:
        assert row.ok, f"N={row.N}: difference {row.difference}"
        assert reduced_secular(row.N) == TABLE1[row.N]
    assert elapsed < 1.0


# 2 ---------------------------------------------------------------------------

@crit(2, "eigenvalues of Q(0) match secular roots to 1e-10, < 10 s")
def test_root_consistency():
    rng = random.Random(20240601)
    start = time.perf_counter()
    worst = 0.0
    for i in range(100):
        N = i % 11
        d = Fraction(rng.randint(-500, 500), 100)
        p = ModelParams.from_d(N, d)
        dev = match_multisets(eigencharges(p).charges, secular_roots(p))
        worst = max(worst, dev)
        assert dev <= 1e-10, f"N={N}, d={d}: {dev}"
    assert time.perf_counter() - start < 10.0
    print(f"worst relative mismatch {worst:.3e}")


# 3 ---------------------------------------------------------------------------

@crit(3, "critical screenings for N = 1, 2, 3")
@pytest.mark.parametrize("N,target,tol", [(1, 2.0, 1e-6), (2, 2.9865, 5e-4), (3, 3.765, 5e-3)])
def test_critical_screenings(N, target, tol):
    value = critical_d(N)
    print(f"critical_d({N}) = {value:.12f}")
    assert abs(value - target) <= tol


# 4 ---------------------------------------------------------------------------

@crit(4, "large-c charges approach c (Y0 - N - 2) and |f_n| ~ 2(n+1)c")
def test_large_c_asymptotics():
    N, c = 5, 100.0
    charges = sorted(eigencharges(ModelParams(N, 0.0, c)).charges, key=lambda z: -z.real)
    predicted = asymptotic_charges(N, c)
    for n, (f, g) in enumerate(zip(charges, predicted)):
        assert abs(f.imag) < 1e-9 * abs(f)
        assert abs(f.real / g - 1) < 2e-3
        assert abs(abs(f) / (2 * (n + 1) * c) - 1) < 2e-3


# 5 ---------------------------------------------------------------------------

@crit(5, "Sturmian h annihilated by Q(f) to 1e-10 and parallel to the null vector")
@pytest.mark.parametrize("N", range(9))
def test_sturmian_residual(N):
    for d in (Fraction(3, 2), Fraction(3), Fraction(5), Fraction(8)):
        p = ModelParams.from_d(N, d)
        real = eigencharges(p).real_charges()
        for z in real:
            # charges are polished to 40 digits; the residual is then computed exactly
            f = mp_fraction(refine_charges(p, [z], dps=40)[0])
            h = right_coefficients(p, f)
            r = build_Q(p, f).matvec(h)
            assert max(abs(v) for v in r) <= Fraction(1, 10 ** 10) * max(abs(v) for v in h)

            M = build_Q(p, float(f), exact=False).dense()
            null = np.linalg.svd(M)[2][-1]
            hf = np.array([float(v) for v in h])
            hf /= np.linalg.norm(hf)
            sign = np.sign(hf @ null)
            assert np.linalg.norm(hf - sign * null) < 1e-7


# 6 ---------------------------------------------------------------------------

@crit(6, "symbolic ODE residual is exactly zero at quasi-exact points")
@pytest.mark.parametrize("c", [Fraction(1), Fraction(5, 2), Fraction(-3, 7), Fraction(7), Fraction(1, 3)])
def test_ode_residual_n0(c):
    p = ModelParams(0, 0, c)
    assert ode_residual(sturmian(p, -2 * c)).is_zero()
    assert not ode_residual(sturmian(p, -2 * c + 1)).is_zero()


@crit(6, "symbolic ODE residual is exactly zero at quasi-exact points")
def test_ode_residual_n1():
    p = ModelParams.from_d(1, Fraction(5, 2))
    for f in (-6, -9):
        assert ode_residual(sturmian(p, Fraction(f))).is_zero()
    for f in (-5, Fraction(-15, 2), 0):
        assert not ode_residual(sturmian(p, Fraction(f))).is_zero()


# 7 ---------------------------------------------------------------------------

@crit(7, "perturbation integers reproduced exactly")
def test_perturbation_integers():
    levels = unperturbed_spectrum(4)
    even = [lvl for lvl in levels if lvl.m % 2 == 0]
    assert [lvl.Y for lvl in even] == [-4, 0, 4]
    assert [lvl.block("h") for lvl in even] == [(1, 0, 0), (1, 2, 0), (3, 12, 4)]
    assert [lvl.block("g") for lvl in even] == [(4, -2, 3), (0, 1, -3), (0, 0, 1)]
    G = overlap_matrix(4, even)
    assert [[G[i, j] for j in range(3)] for i in range(3)] == [[4, 0, 0], [0, 2, 0], [0, 0, 4]]

    series = rs_corrections(2, 2, 1)
    assert series.Y_corrections[1] == 0
    assert series.h_corrections[1] == (0, 4, 0)


# 8 ---------------------------------------------------------------------------

@crit(8, "odd-order corrections vanish exactly")
@pytest.mark.parametrize("N", range(6))
def test_odd_orders_vanish(N):
    for level in range(N + 1):
        Y = rs_corrections(N, level, 7).Y_corrections
        assert all(Y[k] == 0 for k in (1, 3, 5, 7)), (level, Y)


# 9 ---------------------------------------------------------------------------

def _truncation_errors(N, level, K, lams):
    series = rs_corrections(N, level, K + 1)
    errors = []
    with mpmath.workdps(40):
        for lam in lams:
            p = ModelParams.from_lambda(N, lam)
            approx = series.Y(lam, K)
            approx = mpmath.mpf(approx.numerator) / approx.denominator
            roots = refine_charges(p, eigencharges(p).charges, dps=40)
            lm = mpmath.mpf(lam.numerator) / lam.denominator
            exact = min((r * lm + N + 2 for r in roots), key=lambda y: abs(y - approx))
            errors.append(float(abs(exact - approx)))
    return errors


@crit(9, "order-K truncation error falls with log-log slope >= K+1")
@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("K", [2, 4])
def test_series_convergence(N, K):
    lams = [Fraction(v).limit_denominator(10 ** 9) for v in np.geomspace(1e-3, 1e-1, 9)]
    logs = np.log([float(v) for v in lams])
    for level in range(N + 1):
        errors = _truncation_errors(N, level, K, lams)
        slope = np.polyfit(logs, np.log(errors), 1)[0]
        assert slope >= K + 1, f"level {level}: slope {slope:.3f}"


@crit(9, "order-K truncation error falls with log-log slope >= K+1")
def test_series_exact_for_n0():
    # N = 0 has Y = 0 identically: every truncation is exact
    lam = Fraction(1, 20)
    p = ModelParams.from_lambda(0, lam)
    assert rs_corrections(0, 0, 4).Y(lam) == 0
    assert eigencharges(p).charges[0].real * float(lam) + 2 == pytest.approx(0, abs=1e-12)


# 10 --------------------------------------------------------------------------

@crit(10, "charges invariant under (a, c) -> (a + delta, c - delta)")
def test_shift_invariance():
    rng = random.Random(7)
    for _ in range(50):
        N = rng.randint(0, 6)
        p = ModelParams(N, rng.uniform(-2, 2), rng.uniform(-5, 5))
        report = shift_invariance_check(p, rng.uniform(-3, 3), tol=1e-9)
        assert report.ok, report


# 11 --------------------------------------------------------------------------

def closed_form_sturmians(max_N=5):
    """Rational eigencharges found by rounding numerical ones and testing exactly."""
    found = []
    for N in range(max_N + 1):
        for d in [Fraction(k, 2) for k in range(1, 17)]:
            p = ModelParams.from_d(N, d)
            poly = char_poly_f(p)
            for z in eigencharges(p).real_charges():
                f = Fraction(z).limit_denominator(16)
                if poly.evaluate({"f": f}) == 0 and (p, f) not in found:
                    found.append((p, f))
    return found


@crit(11, "sl(2) commutators exact; T phi = f phi on closed-form Sturmians")
@pytest.mark.parametrize("N", range(7))
def test_sl2_commutators(N):
    for c in (Fraction(0), Fraction(5, 2), Fraction(-7, 3)):
        assert sl2_commutator_check(N, c, N + 3).ok
        assert sl2_commutator_check(N, c, N + 6).ok


@crit(11, "sl(2) commutators exact; T phi = f phi on closed-form Sturmians")
def test_recurrence_operator_on_sturmians():
    found = closed_form_sturmians()
    assert {p.N for p, _ in found} >= {0, 1, 2}
    assert (ModelParams.from_d(1, Fraction(5, 2)), Fraction(-6)) in found
    assert (ModelParams.from_d(2, Fraction(3)), Fraction(-14)) in found
    for p, f in found:
        h = right_coefficients(p, f)
        T = recurrence_operator(p.N, p.c)
        image = T.apply(h)
        assert image == [f * v for v in h] + [0] * (len(image) - len(h)), (p, f)


# 12 --------------------------------------------------------------------------

@crit(12, "shooting defect < 1e-6 at quasi-exact points, >= 1e3 x larger off them, < 30 s")
def test_shooting():
    start = time.perf_counter()
    cases = [(0, 3.0), (1, 2.5), (2, 5.0), (3, 5.0)]
    for N, c in cases:
        p = ModelParams(N, 0.0, c)
        for f in eigencharges(p).real_charges():
            res = ode_shoot_refined(p, f)
            off = ode_shoot_refined(p, f + 0.1)
            assert abs(res.defect) < 1e-6, (N, f, res.defect)
            assert abs(off.defect) >= 1e3 * abs(res.defect), (N, f, off.defect)
    assert time.perf_counter() - start < 30.0
