"""Inverse-screening expansion of the charges and coefficient vectors.

With ``a = 0``, ``lam = 1/c`` and the rescaled charge ``Y = (f + (N+2) c) / c``
the matrix ``Q(f) / c`` becomes ``H0 + lam H1 - Y I`` where

* ``H0`` is upper triangular: diagonal ``2n - N`` and second superdiagonal
  ``(n+1)(n+2)``. Its levels are ``Y0 = 2m - N`` for ``m = 0..N``.
* ``H1`` carries the first sub- and superdiagonals ``-2(N+1-n)`` and ``(n+1)(n+2)``.

Levels are labelled by ``m``, the diagonal position of ``Y0`` in ``H0``; the
zero-order right vector lives on indices ``<= m`` and the left vector on
indices ``>= m``, both on the parity class of ``m``. All arithmetic here is
exact by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Sequence

import numpy as np

from .core import is_exact


class DegenerateNormalizationError(ArithmeticError):
    pass


def _zeros(N: int) -> np.ndarray:
    return np.full((N + 1, N + 1), Fraction(0), dtype=object)


def unperturbed_matrix(N: int) -> np.ndarray:
    H = _zeros(N)
    for n in range(N + 1):
        H[n, n] = Fraction(2 * n - N)
        if n + 2 <= N:
            H[n, n + 2] = Fraction((n + 1) * (n + 2))
    return H


def perturbation_matrix(N: int) -> np.ndarray:
    H = _zeros(N)
    for n in range(N + 1):
        if n >= 1:
            H[n, n - 1] = Fraction(-2 * (N + 1 - n))
        if n + 1 <= N:
            H[n, n + 1] = Fraction((n + 1) * (n + 2))
    return H


def build_rescaled(N: int, lam: Any, Y: Any) -> np.ndarray:
    """``M(Y, lam) = H0 + lam H1 - Y I``; exact for rational inputs."""
    M = unperturbed_matrix(N) + lam * perturbation_matrix(N) - Y * np.eye(N + 1, dtype=int).astype(object)
    if is_exact(lam, Y):
        return M
    kind = complex if isinstance(lam, complex) or isinstance(Y, complex) else float
    return M.astype(kind)


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest integer multiple of ``vec`` with its last nonzero-pivot sign kept."""
    den = 1
    for v in vec:
        den = lcm(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(v // g for v in ints) if g else tuple(ints)


@dataclass(frozen=True)
class UnperturbedLevel:
    m: int
    Y: int
    h: tuple[int, ...]
    g: tuple[int, ...]

    def block(self, vec: str = "h") -> tuple[int, ...]:
        """Components on the parity class of ``m`` only."""
        v = getattr(self, vec)
        return tuple(v[self.m % 2::2])


def unperturbed_level(N: int, m: int) -> UnperturbedLevel:
    if not 0 <= m <= N:
        raise ValueError(f"level {m} outside 0..{N}")
    U = unperturbed_matrix(N) - Fraction(2 * m - N) * np.eye(N + 1, dtype=int).astype(object)
    h = [Fraction(0)] * (N + 1)
    h[m] = Fraction(1)
    for i in range(m - 1, -1, -1):
        s = sum((U[i, j] * h[j] for j in range(i + 1, m + 1)), Fraction(0))
        h[i] = -s / U[i, i]
    g = [Fraction(0)] * (N + 1)
    g[m] = Fraction(1)
    for j in range(m + 1, N + 1):
        s = sum((g[i] * U[i, j] for i in range(m, j)), Fraction(0))
        g[j] = -s / U[j, j]
    return UnperturbedLevel(m, 2 * m - N, _primitive(h), _primitive(g))


def unperturbed_spectrum(N: int) -> list[UnperturbedLevel]:
    """Integer eigen-triples of the triangular limit, ordered by ``Y0 = -N, ..., N``.

    Vectors are primitive integer vectors with a positive pivot component.
    """
    return [unperturbed_level(N, m) for m in range(N + 1)]


def _dot(u: Sequence[Any], v: Sequence[Any]) -> Any:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class PerturbationSeries:
    N: int
    level: int
    Y_corrections: tuple[Fraction, ...]
    h_corrections: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return len(self.Y_corrections) - 1

    def partial_sums(self, lam: Any) -> list:
        """``[sum_{k<=K} Y^[k] lam^k for K = 0..order]``."""
        out, total, power = [], 0, 1
        for Yk in self.Y_corrections:
            total = total + _scalar(Yk, lam) * power
            out.append(total)
            power = power * lam
        return out

    def Y(self, lam: Any, K: int | None = None) -> Any:
        K = self.order if K is None else K
        return self.partial_sums(lam)[K]

    def charge(self, lam: Any, K: int | None = None) -> Any:
        """Charge f = c (Y - N - 2) at c = 1/lam."""
        return (self.Y(lam, K) - self.N - 2) / lam

    def vector(self, lam: Any, K: int | None = None) -> list:
        K = self.order if K is None else K
        out = [0] * (self.N + 1)
        power = 1
        for k in range(K + 1):
            out = [o + _scalar(v, lam) * power for o, v in zip(out, self.h_corrections[k])]
            power = power * lam
        return out

    def radius_estimates(self) -> list[float]:
        """Ratio-test estimates sqrt|Y^[2k] / Y^[2k+2]| of the convergence radius in lam.

        A diagnostic only; nothing downstream relies on it.
        """
        even = [Y for k, Y in enumerate(self.Y_corrections) if k % 2 == 0 and k > 0]
        return [float(abs(a / b)) ** 0.5 for a, b in zip(even, even[1:]) if a and b]


def _scalar(value: Fraction, like: Any) -> Any:
    if is_exact(like):
        return value
    if type(like).__module__.startswith("mpmath"):
        import mpmath

        return mpmath.mpf(value.numerator) / value.denominator
    return float(value)


def rs_corrections(N: int, level: int, K: int) -> PerturbationSeries:
    """Rayleigh-Schroedinger corrections up to order ``K`` for level ``m = level``.

    Order ``k`` solves

        (H0 - Y0) h^[k] + H1 h^[k-1] - sum_{j=1..k} Y^[j] h^[k-j] = 0.

    ``Y^[k]`` follows from contracting with the zero-order left vector, and
    ``h^[k]`` is fixed by ``h^[k]_m = 0`` (m is the pivot of ``h^[0]``; for the
    top level m = N this is ``h^[k]_N = 0``).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    lvl = unperturbed_level(N, level)
    m = lvl.m
    H1 = perturbation_matrix(N)
    U = unperturbed_matrix(N) - Fraction(lvl.Y) * np.eye(N + 1, dtype=int).astype(object)
    g0 = [Fraction(v) for v in lvl.g]
    h0 = [Fraction(v) for v in lvl.h]
    gh0 = _dot(g0, h0)
    if gh0 == 0:
        raise DegenerateNormalizationError(f"zero overlap g0.h0 at N={N}, level={level}")
    hs = [h0]
    Ys = [Fraction(lvl.Y)]
    gh = [gh0]
    for k in range(1, K + 1):
        H1h = list(H1.dot(np.array(hs[k - 1], dtype=object)))
        Yk = (_dot(g0, H1h) - sum((Ys[j] * gh[k - j] for j in range(1, k)), Fraction(0))) / gh0
        Ys.append(Yk)
        rhs = [-v for v in H1h]
        for j in range(1, k + 1):
            rhs = [r + Ys[j] * hv for r, hv in zip(rhs, hs[k - j])]
        hk = _solve_complement(U, rhs, m)
        hs.append(hk)
        gh.append(_dot(g0, hk))
    return PerturbationSeries(N, level, tuple(Ys), tuple(tuple(h) for h in hs))


def _solve_complement(U: np.ndarray, rhs: list[Fraction], m: int) -> list[Fraction]:
    """Back-substitute ``U x = rhs`` for upper-triangular U singular only at (m, m), with x_m = 0."""
    n = len(rhs)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = rhs[i] - sum((U[i, j] * x[j] for j in range(i + 1, n)), Fraction(0))
        if i == m:
            if s != 0:
                raise ArithmeticError(f"solvability condition violated in row {m}: {s}")
            continue
        x[i] = s / U[i, i]
    return x


def overlap_matrix(N: int, levels: list[UnperturbedLevel] | None = None) -> np.ndarray:
    levels = unperturbed_spectrum(N) if levels is None else levels
    G = np.full((len(levels), len(levels)), Fraction(0), dtype=object)
    for a, la in enumerate(levels):
        for b, lb in enumerate(levels):
            G[a, b] = _dot([Fraction(v) for v in la.g], lb.h)
    return G


def projectors(N: int) -> list[np.ndarray]:
    """Oblique rank-one projectors ``P_m = h_m F_mm g_m`` with ``F = G^{-1}``.

    G is diagonal because left and right vectors of distinct levels are
    biorthogonal; a nonzero off-diagonal entry or a zero diagonal one raises.
    """
    levels = unperturbed_spectrum(N)
    G = overlap_matrix(N, levels)
    for a in range(N + 1):
        if G[a, a] == 0:
            raise DegenerateNormalizationError(f"singular overlap matrix at level {a}")
        for b in range(N + 1):
            if a != b and G[a, b] != 0:
                raise DegenerateNormalizationError(f"G[{a},{b}] = {G[a, b]} is not zero")
    out = []
    for a, lvl in enumerate(levels):
        h = np.array([Fraction(v) for v in lvl.h], dtype=object)
        g = np.array([Fraction(v) for v in lvl.g], dtype=object)
        out.append(np.outer(h, g) / G[a, a])
    return out
