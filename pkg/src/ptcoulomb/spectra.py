"""Numerical eigencharges, reality classification and the critical screening."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import ModelParams, build_Q
from .secular import char_poly_f

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


class EigensolverError(RuntimeError):
    def __init__(self, message: str, matrix: np.ndarray):
        super().__init__(f"{message}\nQ(0) =\n{np.array2string(matrix, precision=17)}")
        self.matrix = matrix


class BracketError(RuntimeError):
    """The all-real predicate is not a single ray in d over the scanned range."""

    def __init__(self, message: str, trace: list[tuple[float, bool]]):
        lines = "\n".join(f"  d={d:.17g} all_real={ok}" for d, ok in trace)
        super().__init__(f"{message}\nscan trace:\n{lines}")
        self.trace = trace


class TrackingError(RuntimeError):
    pass


def is_real(f: complex, tol: float = DEFAULT_TOL) -> bool:
    return abs(complex(f).imag) <= tol * (1 + abs(f))


@dataclass(frozen=True)
class EigenchargeSet:
    params: ModelParams
    charges: tuple[complex, ...]
    reality_flags: tuple[bool, ...]
    tol: float = DEFAULT_TOL

    @property
    def all_real(self) -> bool:
        return all(self.reality_flags)

    def real_charges(self) -> list[float]:
        return [z.real for z, ok in zip(self.charges, self.reality_flags) if ok]

    def __len__(self) -> int:
        return len(self.charges)


def secular_value(params: ModelParams, f: complex) -> tuple[complex, complex]:
    """Value and f-derivative of det[Q(0) - f I] through the band recurrence.

    Evaluating the determinant recurrence directly is much better conditioned
    than Horner on the expanded coefficients, which grow like (2c)^N N!.
    """
    Q = build_Q(params, 0, exact=False)
    n = Q.size
    dets = [1.0 + 0j]
    ders = [0.0 + 0j]
    for k in range(n):
        b = Q.diag[k] - f
        val = b * dets[k]
        der = -dets[k] + b * ders[k]
        if k >= 1:
            s = Q.sub[k - 1] * Q.sup1[k - 1]
            val -= s * dets[k - 1]
            der -= s * ders[k - 1]
        if k >= 2:
            t = Q.sub[k - 1] * Q.sub[k - 2] * Q.sup2[k - 2]
            val += t * dets[k - 2]
            der += t * ders[k - 2]
        dets.append(val)
        ders.append(der)
    return dets[-1], ders[-1]


def _newton_step(params: ModelParams, z: complex) -> complex:
    p, dp = secular_value(params, z)
    if dp == 0 or not np.isfinite(p) or p == 0:
        return z
    cand = z - p / dp
    if abs(secular_value(params, cand)[0]) <= abs(p):
        return cand
    return z


def _sort_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def eigencharges(params: ModelParams, tol: float = DEFAULT_TOL) -> EigenchargeSet:
    """Eigenvalues of Q(0), each polished by one guarded Newton step on the secular polynomial.

    Real roots stay real (the polynomial has real coefficients). Charges are
    sorted by real part, then imaginary part.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = build_Q(params, 0, exact=False).dense()
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc), M) from exc
    if not np.all(np.isfinite(ev)):
        raise EigensolverError("non-finite eigenvalues", M)
    refined = []
    for z in ev:
        z = complex(z)
        new = _newton_step(params, z)
        if z.imag == 0:
            new = complex(new.real, 0.0)
        refined.append(new)
    refined.sort(key=_sort_key)
    flags = tuple(is_real(z, tol) for z in refined)
    return EigenchargeSet(params, tuple(refined), flags, tol)


def refine_charges(params: ModelParams, seeds: Iterable[complex], dps: int = 40,
                   maxiter: int = 60) -> list:
    """Newton-polish approximate roots on the exact secular polynomial at ``dps`` digits."""
    poly = char_poly_f(params)
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(poly.coefficients())]
        out = []
        for s in seeds:
            z = mpmath.mpc(complex(s))
            for _ in range(maxiter):
                p, dp = mpmath.polyval(coeffs, z, derivative=True)
                if dp == 0:
                    break
                step = p / dp
                z -= step
                if abs(step) <= mpmath.mpf(10) ** (-dps + 3) * (1 + abs(z)):
                    break
            out.append(+z)
    return out


def secular_roots(params: ModelParams, dps: int = 30) -> list[complex]:
    """Roots of the exact secular polynomial, independent of Q.

    The variable is rescaled by the Fujiwara bound so all roots lie in the
    unit disc (``mpmath.polyroots`` stops on an absolute error). Companion
    matrix roots of the rescaled polynomial seed the Durand-Kerner iteration.
    """
    poly = char_poly_f(params)
    coeffs = list(reversed(poly.coefficients()))
    if len(coeffs) == 1:
        return []
    n = len(coeffs) - 1
    lead = coeffs[0]
    bound = 2 * max(float(abs(coeffs[k] / lead)) ** (1.0 / k) for k in range(1, n + 1))
    scale = max(bound, 1.0)
    with mpmath.workdps(dps):
        s = mpmath.mpf(scale)
        mp = [mpmath.mpf(c.numerator) / c.denominator / s ** k for k, c in enumerate(coeffs)]
        mp = [c / mp[0] for c in mp]
        seeds = np.roots([float(c) for c in mp])
        try:
            roots = mpmath.polyroots(mp, maxsteps=200, extraprec=dps,
                                     roots_init=[mpmath.mpc(complex(z)) for z in seeds])
        except mpmath.libmp.NoConvergence:
            roots = mpmath.polyroots(mp, maxsteps=4000, extraprec=4 * dps)
        roots = [r * s for r in roots]
    return sorted((complex(r) for r in roots), key=_sort_key)


def match_multisets(a: Sequence[complex], b: Sequence[complex], relative: bool = True) -> float:
    """Largest (relative) distance under the optimal one-to-one pairing of two multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"size mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    if relative:
        cost = cost / (1 + np.maximum(np.abs(a)[:, None], np.abs(b)[None, :]))
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def all_real(N: int, d: float, tol: float = DEFAULT_TOL) -> bool:
    return eigencharges(ModelParams(N, 0.0, float(d)), tol).all_real


@dataclass
class CriticalSearch:
    N: int
    value: float
    bracket: tuple[float, float]
    trace: list[tuple[float, bool]] = field(default_factory=list)


def find_critical_d(N: int, tol: float = 1e-10, reality_tol: float = DEFAULT_TOL,
                    scan_points: int = 64) -> CriticalSearch:
    """Locate d* such that every charge is real for d > d* (a = 0).

    The bracket starts at [1, 8] and grows geometrically. A uniform scan of
    the bracket must show a single False -> True switch; otherwise the
    assumption that the real phase is a ray fails and the trace is reported.
    """
    if N < 1:
        raise ValueError("the critical screening needs N >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    trace: list[tuple[float, bool]] = []

    def pred(d: float) -> bool:
        ok = all_real(N, d, reality_tol)
        trace.append((d, ok))
        return ok

    lo, hi = 1.0, 8.0
    while pred(lo):
        lo /= 2
        if lo < 1e-8:
            raise BracketError("all charges real down to d ~ 0", trace)
    while not pred(hi):
        hi *= 2
        if hi > 1e8:
            raise BracketError("no all-real point found up to d = 1e8", trace)

    grid = np.linspace(lo, hi, scan_points)
    flags = [pred(float(x)) for x in grid]
    switches = sum(1 for p, q in zip(flags, flags[1:]) if p != q)
    if switches != 1 or flags[0] or not flags[-1]:
        raise BracketError(f"all-real predicate switches {switches} times on [{lo}, {hi}]", trace)
    k = flags.index(True)
    left, right = float(grid[k - 1]), float(grid[k])
    while right - left > tol:
        mid = 0.5 * (left + right)
        if mid in (left, right):
            break
        if pred(mid):
            right = mid
        else:
            left = mid
    log.debug("critical d for N=%d in [%r, %r] after %d evaluations", N, left, right, len(trace))
    return CriticalSearch(N, right, (left, right), trace)


def critical_d(N: int, tol: float = 1e-10, reality_tol: float = DEFAULT_TOL) -> float:
    return find_critical_d(N, tol, reality_tol).value


def unperturbed_levels(N: int) -> list[int]:
    """Zero-order rescaled charges N, N-2, ..., -N."""
    return [N - 2 * n for n in range(N + 1)]


def asymptotic_charges(N: int, c: float) -> list[float]:
    """Leading large-c charges ``c (Y0_n - N - 2)``, i.e. ``-2 (n+1) c`` for n = 0..N."""
    return [c * (y - N - 2) for y in unperturbed_levels(N)]


def track_charges(N: int, c_values: Sequence[float], a: float = 0.0) -> np.ndarray:
    """Follow the N+1 charges along a path of c values, starting from the asymptotic labels.

    Each step pairs the new charges with the previous ones optimally and
    checks that no charge moves by more than half the smallest gap between
    the previous charges. Returns an array of shape ``(len(c_values), N+1)``
    whose column n follows the charge born at ``-2 (n+1) c``.
    """
    c_values = list(c_values)
    if not c_values:
        raise ValueError("empty path")
    first = np.array(eigencharges(ModelParams(N, a, c_values[0])).charges)
    start = np.array(asymptotic_charges(N, c_values[0]), dtype=complex)
    rows, cols = linear_sum_assignment(np.abs(start[:, None] - first[None, :]))
    current = first[cols[np.argsort(rows)]]
    path = [current]
    for c in c_values[1:]:
        new = np.array(eigencharges(ModelParams(N, a, c)).charges)
        cost = np.abs(current[:, None] - new[None, :])
        r, k = linear_sum_assignment(cost)
        moved = new[k[np.argsort(r)]]
        if N >= 1:
            gaps = np.abs(current[:, None] - current[None, :])
            gap = gaps[~np.eye(N + 1, dtype=bool)].min()
            step = np.abs(moved - current).max()
            if step >= gap / 2:
                raise TrackingError(f"step to c={c} moved a charge by {step:.3g} >= gap/2 = {gap / 2:.3g}")
        current = moved
        path.append(current)
    return np.array(path)
