"""Dominance of the majorant bound over the log-linear one.

The ratio r(x) = Q_maj(x) / Q_lc(x) is at most 1 up to the index j**
determined by the root u* of h below; past j** the log-linear bound can
win.  Everything here is derived from that single root, computed once
per process and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .majorant import KnotLattice, q_lc, q_linlc_shifted
from .binomial import TailTable
from .rootfind import bisect_root


def h_function(u: float) -> float:
    """h(u) = ln((1-u)/(-ln u)) - 1 - (1/2)(1+u) ln(u)/(1-u) on (0, 1).

    Diverges to +inf as u -> 0+, tends to 0 from below as u -> 1-, and
    crosses zero exactly once in between; the sign is + below the root
    u* and - above it.
    """
    u = float(u)
    if math.isnan(u) or not (0.0 < u < 1.0):
        raise ValueError("h_function: argument must lie strictly between 0 and 1")
    lu = math.log(u)
    return math.log((1.0 - u) / (-lu)) - 1.0 - 0.5 * (1.0 + u) * lu / (1.0 - u)


@dataclass(frozen=True)
class ComparisonConstants:
    u_star: float
    u_double_star: float
    alpha_star: float
    r_alpha_star: float
    exp_r_minus_one: float


def _solve_u_star() -> float:
    # Bracket by scanning log-spaced points toward both ends; h is +
    # at the left edge and settles negative after its unique root, so
    # the first sign flip over the ordered scan brackets it.
    pts = [10.0 ** (-k) for k in range(15, 0, -1)]
    pts += [0.5] + [1.0 - 10.0 ** (-k) for k in range(1, 15)]
    vals = [h_function(u) for u in pts]
    for i in range(len(pts) - 1):
        if vals[i] > 0.0 and vals[i + 1] <= 0.0:
            return bisect_root(h_function, pts[i], pts[i + 1], xtol=1e-14)
    raise RuntimeError("h sign change not found; cannot happen on (0, 1)")


def _solve_alpha_star() -> tuple[float, float]:
    # r(a) = ln(1/2 - a) / (-a) on (0, 1/2); r'(a) has the sign of
    # phi(a) = a/(1/2 - a) + ln(1/2 - a), which is - left of the
    # minimizer and + right of it.
    def phi(a: float) -> float:
        return a / (0.5 - a) + math.log(0.5 - a)

    a = bisect_root(phi, 1e-12, 0.5 - 1e-12, xtol=1e-12)
    r = math.log(0.5 - a) / (-a)
    return a, r


@lru_cache(maxsize=1)
def comparison_constants() -> ComparisonConstants:
    us = _solve_u_star()
    a, r = _solve_alpha_star()
    return ComparisonConstants(
        u_star=us,
        u_double_star=us / (1.0 - us),
        alpha_star=a,
        r_alpha_star=r,
        exp_r_minus_one=math.expm1(r),
    )


def u_star() -> float:
    return comparison_constants().u_star


def u_double_star() -> float:
    return comparison_constants().u_double_star


def lemma36_constants() -> tuple[float, float, float]:
    """(alpha*, r(alpha*), e^{r(alpha*)} - 1): the minimizing tilt and
    the resulting constants in the two-sided moment comparison."""
    c = comparison_constants()
    return c.alpha_star, c.r_alpha_star, c.exp_r_minus_one


def _validate_np(n: int, p: float) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError("n must be a positive integer")
    if math.isnan(p) or not (0.0 < p < 1.0):
        raise ValueError("p must lie strictly between 0 and 1")


def j_double_star(n: int, p: float) -> int:
    """Largest j with p_{j+1}/p_j >= u**, i.e. floor((n - w)/(1 + w))
    with w = u** q/p.  May be negative (no dominance anywhere) or reach
    n (dominance for every x <= n); both are legitimate values.

    The floor is discontinuous, so near-integer arguments are settled by
    the defining pmf-ratio inequality itself rather than the float floor.
    """
    _validate_np(n, p)
    u = u_double_star()
    w = u * (1.0 - p) / p
    v = (n - w) / (1.0 + w)
    m = round(v)
    if abs(v - m) < 1e-9 and 0 <= m <= n:
        ratio = ((n - m) / (m + 1.0)) * (p / (1.0 - p))
        return m if ratio >= u else m - 1
    return math.floor(v)


def dominance_all_x(n: int, p: float) -> bool:
    """True when the majorant bound is at most the log-linear bound for
    every x <= n, which holds iff n <= (p/q)/u**."""
    _validate_np(n, p)
    return n <= (p / (1.0 - p)) / u_double_star()


def ratio_r(table: TailTable, lattice: KnotLattice, x: float) -> float:
    """r(x) = majorant / log-linear interpolant, both with their own
    conventions left of 0 (both are 1 there, so r = 1).  Undefined past
    n, where the log-linear tail vanishes."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("ratio_r: NaN argument")
    if x > table.n:
        raise ValueError("ratio_r: undefined for x > n (denominator vanishes)")
    return math.exp(q_linlc_shifted(table, lattice, x) - q_lc(table, x))
