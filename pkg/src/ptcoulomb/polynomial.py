"""Sparse exact polynomials over the rationals and the Gaussian rationals.

Only the handful of operations the secular and ODE checks need: ring
arithmetic, substitution of one variable, differentiation, evaluation and a
lossless JSON form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number, Rational
from typing import Any, Iterable, Mapping

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number re + i*im with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: Any) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, Rational):
            return cls(Fraction(value))
        raise TypeError(f"cannot represent {value!r} exactly as a Gaussian rational")

    def __add__(self, other: Any) -> "GaussianRational":
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Any) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other: Any) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Any) -> "GaussianRational":
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}i)"


I = GaussianRational(0, 1)


def _is_zero(value: Any) -> bool:
    return value == 0


class Polynomial:
    """Multivariate polynomial stored as ``{exponents: coefficient}``.

    Coefficients may be any ring elements that support ``+``, ``*`` and
    comparison with zero (``Fraction``, :class:`GaussianRational`, ``complex``).
    Zero coefficients are never stored, so equality is structural.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, terms: Mapping[Exponents, Any], variables: Iterable[str]):
        self.variables: tuple[str, ...] = tuple(variables)
        nvars = len(self.variables)
        clean: dict[Exponents, Any] = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} does not match variables {self.variables}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if isinstance(coeff, int):
                coeff = Fraction(coeff)
            if not _is_zero(coeff):
                clean[exps] = coeff
        self.terms = clean

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, variables: Iterable[str]) -> "Polynomial":
        return cls({}, variables)

    @classmethod
    def constant(cls, value: Any, variables: Iterable[str]) -> "Polynomial":
        variables = tuple(variables)
        return cls({(0,) * len(variables): value}, variables)

    @classmethod
    def variable(cls, name: str, variables: Iterable[str]) -> "Polynomial":
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if sum(exps) != 1:
            raise ValueError(f"{name!r} is not one of {variables}")
        return cls({exps: Fraction(1)}, variables)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[Any], variable: str = "x") -> "Polynomial":
        """Univariate polynomial from ascending coefficients."""
        return cls({(k,): c for k, c in enumerate(coeffs)}, (variable,))

    # arithmetic -----------------------------------------------------------
    def _lift(self, other: Any) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (Number, GaussianRational)):
            return Polynomial.constant(other, self.variables)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other: Any) -> "Polynomial":
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for exps, coeff in o.terms.items():
            out[exps] = out[exps] + coeff if exps in out else coeff
        return Polynomial(out, self.variables)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other: Any) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other: Any) -> "Polynomial":
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        out: dict[Exponents, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return Polynomial(out, self.variables)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(Fraction(1), self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # structure ------------------------------------------------------------
    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise ValueError(f"{var!r} is not one of {self.variables}") from None

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if omitted); -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self._index(var)
        return max(e[i] for e in self.terms)

    def coefficients(self) -> list[Any]:
        """Ascending coefficient list of a univariate polynomial."""
        if len(self.variables) != 1:
            raise ValueError("coefficients() needs a univariate polynomial")
        deg = self.degree()
        return [self.terms.get((k,), Fraction(0)) for k in range(deg + 1)]

    def leading_coefficient(self, var: str) -> "Polynomial":
        """Coefficient of the highest power of ``var``, as a polynomial in the rest."""
        i = self._index(var)
        deg = self.degree(var)
        return Polynomial(
            {e[:i] + (0,) + e[i + 1:]: c for e, c in self.terms.items() if e[i] == deg},
            self.variables,
        )

    def map_coefficients(self, fn) -> "Polynomial":
        return Polynomial({e: fn(c) for e, c in self.terms.items()}, self.variables)

    def derivative(self, var: str) -> "Polynomial":
        i = self._index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        return Polynomial(out, self.variables)

    def substitute(self, var: str, value: "Polynomial") -> "Polynomial":
        """Replace ``var`` by a polynomial in the same variable set."""
        i = self._index(var)
        value = self._lift(value)
        result = Polynomial.zero(self.variables)
        powers: dict[int, Polynomial] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = value ** k
            rest = Polynomial({e[:i] + (0,) + e[i + 1:]: c}, self.variables)
            result = result + rest * powers[k]
        return result

    def evaluate(self, point: Mapping[str, Any] | Any) -> Any:
        """Evaluate at numeric values; a bare value is accepted for univariate input.

        Coefficients are converted with ``convert`` semantics of the point type,
        so passing floats, complex or mpmath numbers all work.
        """
        if not isinstance(point, Mapping):
            if len(self.variables) != 1:
                raise ValueError("multivariate evaluation needs a mapping")
            point = {self.variables[0]: point}
        values = [point[v] for v in self.variables]
        total = 0
        for e, c in self.terms.items():
            term = _as_number(c, values[0] if values else 0)
            for v, k in zip(values, e):
                if k:
                    term = term * v ** k
            total = total + term
        return total

    # io -------------------------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        terms = []
        for e, c in sorted(self.terms.items(), reverse=True):
            if isinstance(c, GaussianRational):
                terms.append([list(e), str(c.re.numerator), str(c.re.denominator),
                              str(c.im.numerator), str(c.im.denominator)])
            elif isinstance(c, Fraction):
                terms.append([list(e), str(c.numerator), str(c.denominator)])
            else:
                z = complex(c)
                terms.append([list(e), {"re": z.real, "im": z.imag}])
        return {"variables": list(self.variables), "terms": terms}

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> "Polynomial":
        terms = {}
        for item in payload["terms"]:
            exps = tuple(item[0])
            if len(item) == 3:
                terms[exps] = Fraction(int(item[1]), int(item[2]))
            elif len(item) == 5:
                terms[exps] = GaussianRational(Fraction(int(item[1]), int(item[2])),
                                               Fraction(int(item[3]), int(item[4])))
            else:
                terms[exps] = complex(item[1]["re"], item[1]["im"])
        return cls(terms, payload["variables"])

    def __str__(self) -> str:
        return format_terms(self.terms, self.variables)

    def __repr__(self) -> str:
        return f"Polynomial({self}, variables={self.variables})"


def _as_number(coeff: Any, like: Any) -> Any:
    if isinstance(coeff, GaussianRational):
        if isinstance(like, (Rational, GaussianRational)):
            return coeff
        re, im = coeff.re, coeff.im
        if type(like).__module__.startswith("mpmath"):
            import mpmath

            return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator,
                              mpmath.mpf(im.numerator) / im.denominator)
        return complex(coeff)
    if isinstance(coeff, Fraction) and type(like).__module__.startswith("mpmath"):
        import mpmath

        return mpmath.mpf(coeff.numerator) / coeff.denominator
    if isinstance(coeff, Fraction) and isinstance(like, (float, complex)):
        return float(coeff)
    return coeff


def _monomial(exps: Exponents, variables: tuple[str, ...]) -> str:
    parts = []
    for v, k in zip(variables, exps):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return " ".join(parts)


def format_terms(terms: Mapping[Exponents, Any], variables: tuple[str, ...]) -> str:
    """Human-readable sum, highest total degree first, e.g. ``-X^3 + 4 d^2 X``."""
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, key=lambda e: (sum(e), e), reverse=True):
        c = terms[e]
        mono = _monomial(e, variables)
        if isinstance(c, Fraction):
            neg = c < 0
            mag = abs(c)
            body = mono if (mag == 1 and mono) else (f"{mag} {mono}".strip())
        else:
            neg = False
            body = f"{c} {mono}".strip() if not (c == 1 and mono) else mono
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)
