"""Sturmian coefficient vectors, wavefunctions and the symbolic ODE residual.

Right vectors ``h`` solve ``Q(f) h = 0`` with ``h_N = 1``; left vectors ``g``
solve ``g Q(f) = 0``. Both come from closed determinant formulas over the
trailing and leading principal minors of Q(f).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Sequence

import numpy as np

from .core import ModelParams, build_Q, energy, is_exact
from .polynomial import GaussianRational, Polynomial
from .secular import leading_minors, trailing_minors
from .spectra import DEFAULT_TOL, eigencharges


def right_coefficients(params: ModelParams, f: Any) -> list:
    """h with h_N = 1 and h_{N-k-1} = det(trailing block from N-k) / (2^{k+1} (k+1)!).

    Exact for rational ``params`` and ``f``. The formula is total; Q(f) h = 0
    holds only when ``f`` is an eigencharge (the row-0 equation is the one
    left over).
    """
    Q = build_Q(params, f)
    N = params.N
    T = trailing_minors(Q, Fraction(1) if Q.exact else 1.0)
    h = [None] * (N + 1)
    h[N] = Fraction(1) if Q.exact else 1.0
    for k in range(N):
        scale = 2 ** (k + 1) * factorial(k + 1)
        h[N - k - 1] = T[N - k] / scale
    return h


def left_coefficients(params: ModelParams, f: Any) -> list:
    """g with g_0 = N! and g_{k+1} = (N-k-1)! / 2^{k+1} * det(leading (k+1)-block).

    Follows from ``g_{k+1} = (-1)^{k+1} det_{k+1} / (A_1 ... A_{k+1})`` with
    ``A_j = -2 (N + 1 - j)``; only the direction of g is meaningful.
    """
    Q = build_Q(params, f)
    N = params.N
    L = leading_minors(Q, Fraction(1) if Q.exact else 1.0)
    g = [Fraction(factorial(N)) if Q.exact else float(factorial(N))]
    for k in range(N):
        g.append(L[k + 1] * factorial(N - k - 1) / 2 ** (k + 1))
    return g


@dataclass(frozen=True)
class SturmianSolution:
    params: ModelParams
    f: Any
    E: Any
    h: tuple
    g: tuple

    @property
    def residual_norm(self) -> float:
        """max |Q(f) h| relative to max |h|."""
        Q = build_Q(self.params, self.f)
        r = Q.matvec(self.h)
        return float(max(abs(complex(v)) for v in r) / max(abs(complex(v)) for v in self.h))

    @property
    def left_residual_norm(self) -> float:
        Q = build_Q(self.params, self.f)
        r = Q.vecmat(self.g)
        return float(max(abs(complex(v)) for v in r) / max(abs(complex(v)) for v in self.g))

    def overlap(self) -> Any:
        return sum(gi * hi for gi, hi in zip(self.g, self.h))


def sturmian(params: ModelParams, f: Any) -> SturmianSolution:
    return SturmianSolution(params, f, energy(params), tuple(right_coefficients(params, f)),
                            tuple(left_coefficients(params, f)))


def sturmian_solutions(params: ModelParams, tol: float = DEFAULT_TOL,
                       real_only: bool = False) -> list[SturmianSolution]:
    """One solution per numerical eigencharge; real charges are passed as floats."""
    spec = eigencharges(params, tol)
    out = []
    for z, ok in zip(spec.charges, spec.reality_flags):
        if real_only and not ok:
            continue
        out.append(sturmian(params.to_float(), z.real if ok else z))
    return out


def wavefunction_eval(sol: SturmianSolution, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """psi(x) = (c + ix) exp(-x^2/2 - iax) sum_n h_n (ix)^n."""
    x = np.asarray(x, dtype=float)
    a = float(sol.params.a)
    c = float(sol.params.c)
    ix = 1j * x
    poly = np.zeros_like(ix)
    for hn in reversed(sol.h):
        poly = poly * ix + complex(hn)
    return (c + ix) * np.exp(-x ** 2 / 2 - 1j * a * x) * poly


def ode_residual(sol: SturmianSolution) -> Polynomial:
    """Polynomial left after inserting the ansatz into the Schroedinger equation.

    With ``psi = exp(S) P``, ``S = -x^2/2 - iax`` and ``P = (c + ix) phi``,
    the equation ``-psi'' + (x^2 + 2iax + if/(x - ic)) psi = E psi`` becomes,
    after dividing by ``exp(S)`` and multiplying by ``(x - ic)``,

        (x - ic) [-(P'' + 2 S' P' + (S'' + S'^2) P) + (x^2 + 2iax - E) P] + i f P.

    Returns that polynomial in ``x``. It is built from the equation alone (not
    from the recurrence coefficients) and is the zero polynomial exactly when
    ``(f, E, h)`` is a quasi-exact solution. Non-rational input falls back to
    complex floating coefficients; inspect :func:`residual_magnitude`.
    """
    p = sol.params
    exact = is_exact(p.a, p.c, sol.f, sol.E, *sol.h)
    if exact:
        i = GaussianRational(0, 1)
        a, c, f, E = Fraction(p.a), Fraction(p.c), Fraction(sol.f), Fraction(sol.E)
        h = [Fraction(v) for v in sol.h]
    else:
        i = 1j
        a, c, f, E = complex(p.a), complex(p.c), complex(sol.f), complex(sol.E)
        h = [complex(v) for v in sol.h]
    V = ("x",)
    x = Polynomial.variable("x", V)
    ix = i * x
    phi = Polynomial.zero(V)
    for hn in reversed(h):
        phi = phi * ix + hn
    P = (c + ix) * phi
    dS = -x - i * a
    ddS = Polynomial.constant(Fraction(-1) if exact else -1.0, V)
    P1 = P.derivative("x")
    P2 = P1.derivative("x")
    kinetic = P2 + 2 * dS * P1 + (ddS + dS * dS) * P
    regular = -kinetic + (x * x + 2 * i * a * x - E) * P
    return (x - i * c) * regular + i * f * P


def residual_magnitude(poly: Polynomial) -> float:
    return max((abs(complex(c)) for c in poly.terms.values()), default=0.0)
