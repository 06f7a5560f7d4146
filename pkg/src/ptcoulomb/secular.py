"""Exact secular polynomials det[Q(0) - f I].

The determinant is never expanded by cofactors: Q has a single subdiagonal,
so its leading principal minors obey a three-term recurrence that only
multiplies and adds band entries. That keeps the computation fraction-free
when the entries are polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .core import ModelParams, QuadridiagonalMatrix, build_Q, generic_coefficients
from .polynomial import Polynomial, format_terms

F_VARS = ("f",)
XD_VARS = ("X", "d")


def band_minors(sub: Sequence[Any], diag: Sequence[Any], sup1: Sequence[Any],
                sup2: Sequence[Any], one: Any = 1) -> list:
    """Leading principal minors ``[det_0, det_1, ..., det_n]`` of a four-band matrix.

    Band layout follows :class:`~ptcoulomb.core.QuadridiagonalMatrix`.
    ``det_0`` is the empty determinant ``one``. Expanding along the last row:

        det_{k+1} = B_k det_k - A_k C_{k-1} det_{k-1} + A_k A_{k-1} D_{k-2} det_{k-2}
    """
    n = len(diag)
    dets = [one]
    for k in range(n):
        val = diag[k] * dets[k]
        if k >= 1:
            val = val - sub[k - 1] * sup1[k - 1] * dets[k - 1]
        if k >= 2:
            val = val + sub[k - 1] * sub[k - 2] * sup2[k - 2] * dets[k - 2]
        dets.append(val)
    return dets


def leading_minors(Q: QuadridiagonalMatrix, one: Any = 1) -> list:
    return band_minors(Q.sub, Q.diag, Q.sup1, Q.sup2, one)


def trailing_minors(Q: QuadridiagonalMatrix, one: Any = 1) -> list:
    """``out[j]`` is the determinant of the trailing block starting at row/column ``j``.

    ``out[n]`` is the empty determinant. Reversing every band is the same as
    the flip-transpose ``J Q^T J``, whose leading blocks are Q's trailing blocks.
    """
    rev = band_minors(Q.sub[::-1], Q.diag[::-1], Q.sup1[::-1], Q.sup2[::-1], one)
    return rev[::-1]


def determinant(Q: QuadridiagonalMatrix) -> Any:
    return leading_minors(Q)[-1]


def char_poly_f(params: ModelParams) -> Polynomial:
    """det[Q(0) - f I] as an exact polynomial in ``f`` of degree N+1."""
    params = params.to_exact()
    Q0 = build_Q(params, 0, exact=True)
    f = Polynomial.variable("f", F_VARS)
    diag = [b - f for b in Q0.diag]
    one = Polynomial.constant(Fraction(1), F_VARS)
    return band_minors(Q0.sub, diag, Q0.sup1, Q0.sup2, one)[-1]


def symbolic_bands(N: int, a: Any, c: Any, f: Any) -> tuple[list, list, list, list]:
    rows = [generic_coefficients(N, a, c, f, n) for n in range(N + 1)]
    return ([rows[n].A for n in range(1, N + 1)], [r.B for r in rows],
            [rows[n].C for n in range(N)], [rows[n].D for n in range(N - 1)])


def reduced_secular(N: int) -> Polynomial:
    """Secular polynomial in the shifted charge ``X = f + (N+2) d`` and ``d = a + c``.

    Computed at ``a = 0, c = d`` with polynomial entries, then ``f`` is
    replaced by ``X - (N+2) d``.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    fvars = ("X", "d", "f")
    d = Polynomial.variable("d", fvars)
    f = Polynomial.variable("f", fvars)
    one = Polynomial.constant(Fraction(1), fvars)
    bands = symbolic_bands(N, Fraction(0), d, f)
    det = band_minors(*bands, one=one)[-1]
    X = Polynomial.variable("X", fvars)
    shifted = det.substitute("f", X - (N + 2) * d)
    if shifted.degree("f") > 0:
        raise AssertionError("f survived the substitution")
    return Polynomial({e[:2]: c for e, c in shifted.terms.items()}, XD_VARS)


def h_of(N: int) -> Polynomial:
    """Abbreviation ``h = d^2 - N - 3`` as a polynomial in (X, d)."""
    d = Polynomial.variable("d", XD_VARS)
    return d * d - (N + 3)


def _reference_rows() -> dict[int, Polynomial]:
    X = Polynomial.variable("X", XD_VARS)
    d = Polynomial.variable("d", XD_VARS)
    rows = {}
    h = h_of(0)
    rows[0] = -X
    h = h_of(1)
    rows[1] = X ** 2 - h
    h = h_of(2)
    rows[2] = -X ** 3 + 4 * h * X + 8 * d
    h = h_of(3)
    rows[3] = X ** 4 - 10 * h * X ** 2 - 48 * d * X + 9 * h ** 2 - 36
    h = h_of(4)
    rows[4] = -X ** 5 + 20 * h * X ** 3 + 168 * d * X ** 2 - 32 * (2 * h ** 2 - 9) * X - 384 * h * d
    h = h_of(5)
    rows[5] = (X ** 6 - 35 * h * X ** 4 - 448 * d * X ** 3 + (259 * h ** 2 - 1296) * X ** 2
               + 3520 * h * d * X - 225 * h ** 3 + 10000 * h + 51200)
    return rows


#: Reference secular polynomials for N = 0..5, written with h = d^2 - N - 3.
TABLE1: dict[int, Polynomial] = _reference_rows()


@dataclass(frozen=True)
class Table1Row:
    N: int
    computed: Polynomial
    reference: Polynomial
    ok: bool

    @property
    def difference(self) -> Polynomial:
        return self.computed - self.reference


def table1_check() -> list[Table1Row]:
    """Compare :func:`reduced_secular` with the reference rows for N = 0..5."""
    out = []
    for N, reference in TABLE1.items():
        computed = reduced_secular(N)
        out.append(Table1Row(N, computed, reference, computed == reference))
    return out


def in_h_form(poly: Polynomial, N: int) -> dict[int, dict[tuple[int, int], Fraction]]:
    """Rewrite a polynomial in (X, d) as ``sum_k X^k (p_k(h) + d q_k(h))``.

    Returns ``{k: {(h_power, d_power): coeff}}`` with ``d_power`` in {0, 1}.
    The form is unique because ``d^2 = h + N + 3``.
    """
    shift = N + 3
    out: dict[int, dict[tuple[int, int], Fraction]] = {}
    for (kx, kd), coeff in poly.terms.items():
        # d^kd = d^(kd mod 2) * (h + shift)^(kd // 2)
        m, r = divmod(kd, 2)
        binom = 1
        bucket = out.setdefault(kx, {})
        for j in range(m + 1):
            term = coeff * binom * Fraction(shift) ** (m - j)
            key = (j, r)
            bucket[key] = bucket.get(key, Fraction(0)) + term
            binom = binom * (m - j) // (j + 1)
    return {k: {e: c for e, c in v.items() if c} for k, v in out.items()}


def format_h_form(poly: Polynomial, N: int) -> str:
    """Render as a polynomial in X with coefficients in h and d, e.g. ``X^4 - 10 h X^2 - 48 d X + 9 h^2 - 36``."""
    hd = ("h", "d")
    pieces: list[tuple[bool, str]] = []
    groups = in_h_form(poly, N)
    for k in sorted(groups, reverse=True):
        group = groups[k]
        xs = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
        if k == 0 or len(group) == 1:
            for e in sorted(group, key=lambda e: (sum(e), e), reverse=True):
                c = group[e]
                mono = format_terms({e: abs(c)}, hd)
                if mono == "1" and xs:
                    mono = ""
                pieces.append((c < 0, f"{mono} {xs}".strip()))
        else:
            lead = group[max(group, key=lambda e: (sum(e), e))]
            sign = -1 if lead < 0 else 1
            inner = format_terms({e: sign * c for e, c in group.items()}, hd)
            pieces.append((sign < 0, f"({inner}) {xs}"))
    if not pieces:
        return "0"
    text = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        text += (" - " if neg else " + ") + body
    return text
