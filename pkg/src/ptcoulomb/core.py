"""Model parameters, recurrence coefficients and the four-band matrix Q(f).

The terminating ansatz ``psi = (c + ix) exp(-x^2/2 - iax) sum_n h_n (ix)^n``
turns the Schroedinger equation into the recurrences

    A_n h_{n-1} + B_n h_n + C_n h_{n+1} + D_n h_{n+2} = 0,   n = 0..N,

with ``h_{-1} = h_{N+1} = h_{N+2} = 0``. Everything here is exact when the
inputs are ``int``/``Fraction`` and floating point otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number, Rational
from typing import Any, NamedTuple, Sequence

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def is_exact(*values: Any) -> bool:
    """True when every value is an exact rational (``bool`` excluded)."""
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def as_exact(value: Any) -> Fraction:
    """Convert to ``Fraction``; floats are taken at their exact binary value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, complex):
        if value.imag:
            raise DomainError(f"{value!r} is not real")
        value = value.real
    return Fraction(value)


@dataclass(frozen=True)
class ModelParams:
    """Sector of the model: polynomial degree ``N`` and real shifts ``a``, ``c``.

    ``d = a + c`` is the only combination the eigencharges depend on.
    ``lam = 1/c`` is the inverse screening used by the perturbative treatment.
    """

    N: int
    a: Number = 0
    c: Number = 1

    def __post_init__(self) -> None:
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise DomainError(f"N must be an integer, got {self.N!r}")
        if self.N < 0:
            raise DomainError(f"N must be non-negative, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("a", "c"):
            v = getattr(self, name)
            if isinstance(v, complex) or not isinstance(v, Number):
                raise DomainError(f"{name} must be real, got {v!r}")
            if isinstance(v, int) and not isinstance(v, bool):
                object.__setattr__(self, name, Fraction(v))

    @property
    def d(self) -> Number:
        return self.a + self.c

    @property
    def lam(self) -> Number:
        if self.c == 0:
            raise DomainError("lambda = 1/c is undefined for c = 0")
        return 1 / self.c if not is_exact(self.c) else Fraction(1) / self.c

    @property
    def exact(self) -> bool:
        return is_exact(self.a, self.c)

    @classmethod
    def from_d(cls, N: int, d: Number, a: Number = 0) -> "ModelParams":
        return cls(N, a, d - a)

    @classmethod
    def from_lambda(cls, N: int, lam: Number) -> "ModelParams":
        if lam == 0:
            raise DomainError("lambda must be nonzero")
        c = Fraction(1) / lam if is_exact(lam) else 1.0 / lam
        return cls(N, 0, c)

    def to_exact(self) -> "ModelParams":
        return ModelParams(self.N, as_exact(self.a), as_exact(self.c))

    def to_float(self) -> "ModelParams":
        return ModelParams(self.N, float(self.a), float(self.c))


class RecurrenceCoefficients(NamedTuple):
    """Coefficients of row ``n``; ``B`` already includes the ``-f`` shift."""

    A: Any
    B: Any
    C: Any
    D: Any


def recurrence_coefficients(params: ModelParams, f: Any, n: int) -> RecurrenceCoefficients:
    """Closed-form A_n, B_n(f), C_n, D_n for row ``n``.

    The formulas are total: ``A_0`` and the entries that would fall outside
    the matrix (``C_N``, ``D_{N-1}``, ``D_N``) are still returned.
    """
    if not 0 <= n <= params.N:
        raise DomainError(f"row index {n} outside 0..{params.N}")
    return generic_coefficients(params.N, params.a, params.c, f, n)


def generic_coefficients(N: int, a: Any, c: Any, f: Any, n: int) -> RecurrenceCoefficients:
    """Same formulas with ``a``, ``c``, ``f`` from any commutative ring (e.g. polynomials)."""
    A = -2 * (N + 1 - n)
    B = -2 * a * (n + 1) - 2 * c * (N + 1 - n) - f
    C = (n + 1) * (n + 2 - 2 * a * c)
    D = c * (n + 1) * (n + 2)
    return RecurrenceCoefficients(A, B, C, D)


@dataclass(frozen=True)
class QuadridiagonalMatrix:
    """Square matrix with one sub- and two superdiagonals.

    Band layout for size ``n``: ``diag[i] = M[i, i]``, ``sub[i] = M[i+1, i]``,
    ``sup1[i] = M[i, i+1]``, ``sup2[i] = M[i, i+2]``.
    """

    sub: tuple
    diag: tuple
    sup1: tuple
    sup2: tuple
    exact: bool

    @property
    def size(self) -> int:
        return len(self.diag)

    def entry(self, i: int, j: int) -> Any:
        n = self.size
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError((i, j))
        zero = Fraction(0) if self.exact else 0.0
        if j == i - 1:
            return self.sub[j]
        if j == i:
            return self.diag[i]
        if j == i + 1:
            return self.sup1[i]
        if j == i + 2:
            return self.sup2[i]
        return zero

    def dense(self) -> np.ndarray:
        """Dense copy: ``object`` array of Fractions in exact mode, else numeric."""
        n = self.size
        if self.exact:
            M = np.full((n, n), Fraction(0), dtype=object)
        else:
            dtype = complex if any(isinstance(v, complex) for v in self.diag) else float
            M = np.zeros((n, n), dtype=dtype)
        for i in range(n):
            M[i, i] = self.diag[i]
            if i + 1 < n:
                M[i + 1, i] = self.sub[i]
                M[i, i + 1] = self.sup1[i]
            if i + 2 < n:
                M[i, i + 2] = self.sup2[i]
        return M

    def to_float(self) -> "QuadridiagonalMatrix":
        conv = lambda vals: tuple(float(v) if isinstance(v, Rational) else v for v in vals)
        return QuadridiagonalMatrix(conv(self.sub), conv(self.diag), conv(self.sup1),
                                    conv(self.sup2), exact=False)

    def shifted(self, f: Any) -> "QuadridiagonalMatrix":
        """Return ``self - f*I``."""
        exact = self.exact and is_exact(f)
        return QuadridiagonalMatrix(self.sub, tuple(b - f for b in self.diag),
                                    self.sup1, self.sup2, exact)

    def matvec(self, v: Sequence[Any]) -> list:
        n = self.size
        out = []
        for i in range(n):
            s = self.diag[i] * v[i]
            if i > 0:
                s = s + self.sub[i - 1] * v[i - 1]
            if i + 1 < n:
                s = s + self.sup1[i] * v[i + 1]
            if i + 2 < n:
                s = s + self.sup2[i] * v[i + 2]
            out.append(s)
        return out

    def vecmat(self, g: Sequence[Any]) -> list:
        """Row vector times matrix, ``g @ M``."""
        n = self.size
        out = []
        for j in range(n):
            s = g[j] * self.diag[j]
            if j + 1 < n:
                s = s + g[j + 1] * self.sub[j]
            if j > 0:
                s = s + g[j - 1] * self.sup1[j - 1]
            if j > 1:
                s = s + g[j - 2] * self.sup2[j - 2]
            out.append(s)
        return out


def build_Q(params: ModelParams, f: Any = 0, exact: bool | None = None) -> QuadridiagonalMatrix:
    """Assemble Q(f) = Q(0) - f I.

    ``exact=None`` picks the rational backend whenever ``a``, ``c`` and ``f``
    are all rational; ``exact=True`` converts floats at their binary value.
    """
    if exact is None:
        exact = params.exact and is_exact(f)
    if exact:
        params = params.to_exact()
        f = as_exact(f)
    else:
        params = params.to_float()
        f = complex(f) if isinstance(f, complex) and f.imag else float(np.real(f))
    N = params.N
    rows = [recurrence_coefficients(params, f, n) for n in range(N + 1)]
    sub = tuple(rows[n].A for n in range(1, N + 1))
    diag = tuple(r.B for r in rows)
    sup1 = tuple(rows[n].C for n in range(N))
    sup2 = tuple(rows[n].D for n in range(N - 1))
    if not exact:
        sub = tuple(float(v) for v in sub)
    else:
        sub = tuple(Fraction(v) for v in sub)
    return QuadridiagonalMatrix(sub, diag, sup1, sup2, exact)


def energy(params: ModelParams) -> Number:
    """Energy fixed by termination of the series: E = 2N + a^2 + 3."""
    return 2 * params.N + params.a ** 2 + 3
