"""Tail interpolants and the least log-concave majorant.

Three continuum extensions of the binomial upper tail live here: the
linear interpolant q_lin, the log-linear (geometric) interpolant q_lc,
and the least log-concave majorant of the shifted linear interpolant,
q_linlc_shifted, assembled from the knot lattice (y_j, x_j).

The scalar entry points are the reference implementations; the grid_*
variants vectorize the same arithmetic, in the same operation order, for
sweeps and hull comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binomial import LOG_ZERO, TailTable


def q_lin(table: TailTable, z: float) -> float:
    """ln of the piecewise-linear tail interpolant at direct argument z.

    Linear between (j, q_j) and (j+1, q_{j+1}); identically 1 left of 0
    and identically 0 right of n+1.  Integer z returns log_tail[z]
    exactly.
    """
    z = float(z)
    if math.isnan(z):
        raise ValueError("q_lin: NaN argument")
    n = table.n
    if z <= 0.0:
        return 0.0
    if z >= n + 1.0:
        return LOG_ZERO
    k = int(math.floor(z))
    t = z - k
    lt = table.log_tail
    a = math.log1p(-t) + lt[k]
    if t == 0.0 or lt[k + 1] == LOG_ZERO:
        return float(a)
    return float(np.logaddexp(a, math.log(t) + lt[k + 1]))


def q_lc(table: TailTable, x: float) -> float:
    """ln of the log-linear tail interpolant (geometric between lattice
    points); 1 left of 0, 0 strictly right of n."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("q_lc: NaN argument")
    n = table.n
    if x <= 0.0:
        return 0.0
    if x > n:
        return LOG_ZERO
    j = int(math.floor(x))
    t = x - j
    lt = table.log_tail
    if t == 0.0:
        return float(lt[j])
    return float((1.0 - t) * lt[j] + t * lt[j + 1])


@dataclass(frozen=True)
class Knot:
    """One interpolation interval (y_j, x_j) with the interpolant's log
    values at its endpoints (taken from the shifted linear tail)."""

    j: int
    y: float
    x: float
    log_at_y: float
    log_at_x: float


@dataclass(frozen=True, eq=False)
class KnotLattice:
    """Knots j = j_star .. n+1 for one tail table.

    The terminal knot (n+1) has interval (n+1/2, n+3/2) where the
    majorant is exactly zero, so both endpoint logs are -inf and it
    never participates in interpolation.  The private arrays cache the
    non-terminal knots for vectorized evaluation.
    """

    table: TailTable
    knots: tuple[Knot, ...]
    _ys: np.ndarray
    _xs: np.ndarray
    _ly: np.ndarray
    _lx: np.ndarray

    def knot(self, j: int) -> Knot:
        js = self.table.j_star
        if not (js <= j <= self.table.n + 1):
            raise ValueError(f"knot index must lie in [{js}, {self.table.n + 1}]")
        return self.knots[j - js]


def build_knot_lattice(table: TailTable) -> KnotLattice:
    spec = table.spec
    n = spec.n
    js = table.j_star
    lpmf = table.log_pmf
    lt = table.log_tail
    lqp = math.log(spec.q) - math.log(spec.p)
    knots = []
    for j in range(js, n + 1):
        if lpmf[j - 1] == LOG_ZERO or lpmf[j] == LOG_ZERO:
            raise ValueError("knot construction hit a vanishing pmf value")
        r_p = math.exp(lt[j] - lpmf[j])
        r_pm1 = math.exp(lt[j] - lpmf[j - 1])
        # L = ln(p_{j-1}/p_j) analytically; for j >= j_star it is > 0.
        L = math.log(j / (n - j + 1.0)) + lqp
        # (r_pm1 - r_p)/L in a form that does not cancel near j_star,
        # where the two ratios approach each other.  L > 0 holds for
        # every j >= j_star; if float cancellation rounds it to zero the
        # correction takes its L -> 0+ limit, -r_p.
        corr = r_p * math.expm1(-L) / L if L > 0.0 else -r_p
        x = (j - 0.5) + r_p + corr
        y = (j - 0.5) + r_pm1 + corr
        # p_j <= p_{j-1} for j >= j_star forces y <= x; a pmf tie plus
        # rounding can invert the pair by an ulp, collapsing the bridge.
        if y > x:
            y = x
        knots.append(
            Knot(j=j, y=y, x=x, log_at_y=q_lin(table, y + 0.5), log_at_x=q_lin(table, x + 0.5))
        )
    knots.append(Knot(j=n + 1, y=n + 0.5, x=n + 1.5, log_at_y=LOG_ZERO, log_at_x=LOG_ZERO))
    ys = np.array([k.y for k in knots[:-1]])
    xs = np.array([k.x for k in knots[:-1]])
    ly = np.array([k.log_at_y for k in knots[:-1]])
    lx = np.array([k.log_at_x for k in knots[:-1]])
    for a in (ys, xs, ly, lx):
        a.setflags(write=False)
    return KnotLattice(table=table, knots=tuple(knots), _ys=ys, _xs=xs, _ly=ly, _lx=lx)


def q_interp(table: TailTable, knot: Knot, x: float) -> float:
    """Log-linear interpolation across one knot interval [y_j, x_j].

    Endpoints return the knot's stored logs exactly.  On the terminal
    knot the majorant is identically zero, so -inf comes back for any x
    in its interval.
    """
    x = float(x)
    if math.isnan(x) or not (knot.y <= x <= knot.x):
        raise ValueError(f"q_interp: x must lie in [{knot.y}, {knot.x}]")
    if x == knot.y:
        return knot.log_at_y
    if x == knot.x:
        return knot.log_at_x
    if knot.log_at_y == LOG_ZERO:
        return LOG_ZERO
    d = (x - knot.y) / (knot.x - knot.y)
    return (1.0 - d) * knot.log_at_y + d * knot.log_at_x


def q_linlc_shifted(table: TailTable, lattice: KnotLattice, x: float) -> float:
    """ln of the least log-concave majorant of z -> q_lin(z + 1/2).

    Equals the shifted linear interpolant outside the open intervals
    (y_j, x_j), and the log-linear bridge of q_lin(y_j + 1/2),
    q_lin(x_j + 1/2) inside them.  Exactly 0 (log 1) for x <= -1/2 and
    exactly -inf for x >= n + 1/2.  Only knots floor(x) and floor(x)+1
    can cover x, so the lookup is O(1).
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("q_linlc_shifted: NaN argument")
    n = table.n
    if x >= n + 0.5:
        return LOG_ZERO
    if x <= -0.5:
        return 0.0
    js = table.j_star
    j0 = int(math.floor(x))
    for j in (j0, j0 + 1):
        if j < js or j > n:
            continue
        k = lattice.knot(j)
        if k.y < x < k.x:
            return q_interp(table, k, x)
        if x == k.y or x == k.x:
            # The bridge meets the linear interpolant at the knot
            # endpoints; fall through to the linear value but keep the
            # continuity contract checked in debug builds.
            lin = q_lin(table, x + 0.5)
            assert abs(q_interp(table, k, x) - lin) <= 1e-10
            return lin
    return q_lin(table, x + 0.5)


def grid_log_lin(table: TailTable, z) -> np.ndarray:
    """Vectorized q_lin over an array of direct arguments."""
    z = np.asarray(z, dtype=float)
    n = table.n
    lt = table.log_tail
    out = np.empty(z.shape)
    left = z <= 0.0
    right = z >= n + 1.0
    mid = ~(left | right)
    out[left] = 0.0
    out[right] = LOG_ZERO
    zm = z[mid]
    k = np.floor(zm).astype(np.int64)
    t = zm - k
    a = np.log1p(-t) + lt[k]
    with np.errstate(divide="ignore"):
        logt = np.log(t)
    b = np.where(t > 0.0, logt + lt[k + 1], LOG_ZERO)
    out[mid] = np.logaddexp(a, b)
    return out


def grid_log_lc(table: TailTable, x) -> np.ndarray:
    """Vectorized q_lc."""
    x = np.asarray(x, dtype=float)
    n = table.n
    lt = table.log_tail
    out = np.empty(x.shape)
    left = x <= 0.0
    right = x > n
    mid = ~(left | right)
    out[left] = 0.0
    out[right] = LOG_ZERO
    xm = x[mid]
    j = np.floor(xm).astype(np.int64)
    t = xm - j
    base = (1.0 - t) * lt[j]
    pos = t > 0.0
    # t == 0 only at x == n inside mid; lt[n+1] is -inf, so the product
    # is only formed where t > 0 (j + 1 <= n there).
    base[pos] += t[pos] * lt[j + 1][pos]
    out[mid] = base
    return out


def grid_log_majorant(table: TailTable, lattice: KnotLattice, x) -> np.ndarray:
    """Vectorized q_linlc_shifted.  Pointwise consistent with the scalar
    path to float roundoff (same formulas, same branch boundaries)."""
    x = np.asarray(x, dtype=float)
    out = grid_log_lin(table, x + 0.5)
    ys, xs = lattice._ys, lattice._xs
    if ys.size:
        idx = np.searchsorted(ys, x, side="right") - 1
        c = np.clip(idx, 0, ys.size - 1)
        inside = (idx >= 0) & (x > ys[c]) & (x < xs[c])
        if inside.any():
            g = c[inside]
            d = (x[inside] - ys[g]) / (xs[g] - ys[g])
            out[inside] = (1.0 - d) * lattice._ly[g] + d * lattice._lx[g]
    # Exact zero from n + 1/2 on (grid_log_lin already returns -inf for
    # z >= n + 1, i.e. x >= n + 1/2).
    return out
