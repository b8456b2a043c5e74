"""Independent verification routes.

Everything here deliberately avoids the production formulas: exact tails
come from high-precision arithmetic on the pmf recurrence (or exact
rationals when p is rational), and the majorant is rebuilt as the upper
concave hull of dense samples of the shifted linear tail.  Agreement
between the two routes is what the oracle-check command and half the
test suite assert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .binomial import LOG_ZERO, BinomialSpec, TailTable
from .majorant import KnotLattice

_MAX_EXACT_N = 1000


@lru_cache(maxsize=64)
def _exact_tails(spec: BinomialSpec) -> tuple:
    """Upper tails q_j, j = 0..n+1, as Fractions (rational p) or mpf at
    60 significant digits.  Cached per spec; n above 1000 is refused."""
    n = spec.n
    if n > _MAX_EXACT_N:
        raise ValueError(f"exact tails refused for n > {_MAX_EXACT_N}")
    if spec.p_exact is not None:
        p = spec.p_exact
        q = 1 - p
        pmf = [Fraction(0)] * (n + 1)
        pmf[0] = q**n
        for j in range(1, n + 1):
            pmf[j] = pmf[j - 1] * (n - j + 1) * p / (j * q)
        tails = [Fraction(0)] * (n + 2)
        for j in range(n, -1, -1):
            tails[j] = tails[j + 1] + pmf[j]
        return tuple(tails)
    with mpmath.workdps(60):
        p = mpmath.mpf(spec.p)
        q = 1 - p
        pmf = [mpmath.mpf(0)] * (n + 1)
        pmf[0] = q**n
        for j in range(1, n + 1):
            pmf[j] = pmf[j - 1] * (n - j + 1) * p / (j * q)
        tails = [mpmath.mpf(0)] * (n + 2)
        for j in range(n, -1, -1):
            tails[j] = tails[j + 1] + pmf[j]
        return tuple(tails)


def exact_tail(spec: BinomialSpec, j: int) -> float:
    """P(B >= j) by the independent high-precision route, rounded to
    float at the end.  j = 0 gives exactly 1, j = n+1 exactly 0."""
    if not isinstance(j, (int, np.integer)) or isinstance(j, bool):
        raise ValueError("j must be an integer")
    n = spec.n
    if not (0 <= j <= n + 1):
        raise ValueError(f"j must lie in [0, {n + 1}]")
    return float(_exact_tails(spec)[j])


def exact_log_tail(spec: BinomialSpec, j: int) -> float:
    """ln P(B >= j) by the independent route; -inf at j = n+1."""
    if not isinstance(j, (int, np.integer)) or isinstance(j, bool):
        raise ValueError("j must be an integer")
    n = spec.n
    if not (0 <= j <= n + 1):
        raise ValueError(f"j must lie in [0, {n + 1}]")
    t = _exact_tails(spec)[j]
    if t == 0:
        return LOG_ZERO
    if isinstance(t, Fraction):
        with mpmath.workdps(60):
            return float(mpmath.log(mpmath.mpf(t.numerator) / t.denominator))
    with mpmath.workdps(60):
        return float(mpmath.log(t))


@dataclass(frozen=True)
class HullFunction:
    """Upper concave hull of a finite sample set, evaluated by linear
    interpolation between vertices (affine in the log values).

    Vertices are strictly increasing in abscissa and concave; an
    optional terminal -inf vertex marks the point from which the hull is
    exactly zero.
    """

    xs: np.ndarray
    ys: np.ndarray
    terminal: tuple[float, float] | None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.xs, self.ys)
        if self.terminal is not None:
            out = np.where(x >= self.terminal[0], LOG_ZERO, out)
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def vertices(self) -> list[tuple[float, float]]:
        v = list(zip(self.xs.tolist(), self.ys.tolist()))
        if self.terminal is not None:
            v.append(self.terminal)
        return v


def _cross(ox, oy, ax, ay, bx, by) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def concave_hull_majorant(xs, ys) -> HullFunction:
    """Least concave majorant of the points (xs, ys) on [xs[0], xs[-1]],
    by a monotone chain over the already-sorted abscissas.

    ys may end with a run of -inf (an exactly-zero tail); those points
    collapse into a single terminal vertex and never enter the chain
    arithmetic.  -inf anywhere else is rejected, as is any non-increasing
    abscissa pair.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need at least two samples of equal length")
    if not np.all(np.diff(xs) > 0.0):
        raise ValueError("sample abscissas must be strictly increasing")
    if np.any(np.isnan(xs)) or np.any(np.isnan(ys)) or np.any(np.isinf(xs)):
        raise ValueError("samples must be finite (ys may be -inf only)")
    if np.any(np.isposinf(ys)):
        raise ValueError("samples must be finite (ys may be -inf only)")
    neginf = np.isneginf(ys)
    terminal = None
    if neginf.any():
        first = int(np.argmax(neginf))
        if not neginf[first:].all():
            raise ValueError("-inf samples must form a trailing run")
        terminal = (float(xs[first]), LOG_ZERO)
        xs, ys = xs[:first], ys[:first]
        if xs.size == 0:
            raise ValueError("all samples are -inf")
    hull_x: list[float] = []
    hull_y: list[float] = []
    for x, y in zip(xs.tolist(), ys.tolist()):
        while len(hull_x) >= 2 and _cross(
            hull_x[-2], hull_y[-2], hull_x[-1], hull_y[-1], x, y
        ) >= 0.0:
            hull_x.pop()
            hull_y.pop()
        hull_x.append(x)
        hull_y.append(y)
    hx = np.array(hull_x)
    hy = np.array(hull_y)
    hx.setflags(write=False)
    hy.setflags(write=False)
    return HullFunction(xs=hx, ys=hy, terminal=terminal)


def lc_majorant_on_integers(table: TailTable) -> HullFunction:
    """Upper concave hull of the integer lattice points (j, ln q_j).

    The log tail is already concave on the lattice, so every lattice
    point is a hull vertex and the result coincides with the log-linear
    interpolant between integers."""
    n = table.n
    return concave_hull_majorant(np.arange(n + 2, dtype=float), table.log_tail)


def majorant_samples(table: TailTable, lattice: KnotLattice, step: float = 1e-3):
    """Sample abscissas and log values of the shifted linear tail, dense
    enough that their concave hull reproduces the majorant.

    A uniform grid over [-1, n + 1/2] is augmented with the knot
    endpoints (where the hull's contact points live) and with n + 1/2
    itself, so the exactly-zero region starts on a sample."""
    from .majorant import grid_log_lin

    if not (0.0 < step <= 0.1):
        raise ValueError("step must lie in (0, 0.1]")
    n = table.n
    count = int(math.floor((n + 1.5) / step)) + 1
    grid = -1.0 + np.arange(count) * step
    extra = [float(n) + 0.5]
    for k in lattice.knots[:-1]:
        extra.extend((k.y, k.x))
    xs = np.unique(np.concatenate([grid, np.array(extra)]))
    xs = xs[xs <= n + 0.5]
    return xs, grid_log_lin(table, xs + 0.5)


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported distribution given by (value, probability)
    atoms with strictly increasing values and probabilities summing to
    one within 1e-12."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise ValueError("need at least one atom")
        vals = [a[0] for a in self.atoms]
        probs = [a[1] for a in self.atoms]
        if any(math.isnan(v) or math.isinf(v) for v in vals):
            raise ValueError("atom values must be finite")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("atom values must be strictly increasing")
        if any(w < 0.0 or math.isnan(w) for w in probs):
            raise ValueError("atom probabilities must be nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError("atom probabilities must sum to one")
        object.__setattr__(
            self, "atoms", tuple((float(v), float(w)) for v, w in self.atoms)
        )

    @property
    def values(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])

    def mean(self) -> float:
        return math.fsum(v * w for v, w in self.atoms)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum(w * (v - m) ** 2 for v, w in self.atoms)

    def max_value(self) -> float:
        return self.atoms[-1][0]


def convolve(a: DiscreteDistribution, b: DiscreteDistribution) -> DiscreteDistribution:
    """Distribution of X + Y for independent X ~ a, Y ~ b.  Sums whose
    values coincide to ~1e-12 relative are merged into one atom."""
    sums: dict[float, float] = {}
    keys: list[float] = []
    for v, w in a.atoms:
        for u, z in b.atoms:
            s = v + u
            for k in keys:
                if abs(s - k) <= 1e-12 * (1.0 + abs(k)):
                    sums[k] += w * z
                    break
            else:
                keys.append(s)
                sums[s] = w * z
    total = math.fsum(sums.values())
    atoms = tuple((k, sums[k] / total) for k in sorted(sums))
    return DiscreteDistribution(atoms=atoms)


def extremal_two_point(d: float, sigma: float) -> DiscreteDistribution:
    """The mean-zero two-point law on {-sigma^2/d, d} with variance
    sigma^2: the extremal case of the one-step inequality."""
    if not (d > 0.0 and sigma > 0.0):
        raise ValueError("d and sigma must be positive")
    a = sigma * sigma / (d * d)
    return DiscreteDistribution(
        atoms=((-a * d, 1.0 / (1.0 + a)), (d, a / (1.0 + a)))
    )


def lemma32_check(
    dist: DiscreteDistribution, d: float, sigma: float, t: float
) -> tuple[float, float, bool]:
    """One-step truncated-second-moment extremality check.

    For X ~ dist with X <= d, E X = 0, Var X <= sigma^2, compares
    lhs = E (X - t)+^2 against the same functional of the mean-zero
    two-point law on {-sigma^2/d, d}, which maximizes it.  The rhs is
    summed over the extremal law's atoms directly rather than through
    any closed form.  Returns (lhs, rhs, lhs <= rhs + 1e-12); equality
    holds exactly when dist is that two-point law.
    """
    if not (d > 0.0 and sigma > 0.0):
        raise ValueError("d and sigma must be positive")
    if math.isnan(t):
        raise ValueError("t must be a number")
    if dist.max_value() > d + 1e-12:
        raise ValueError("distribution support must lie in (-inf, d]")
    if abs(dist.mean()) > 1e-12:
        raise ValueError("distribution mean must be zero")
    if dist.variance() > sigma * sigma + 1e-12:
        raise ValueError(f"distribution variance must be at most {sigma * sigma}")
    lhs = math.fsum(w * (v - t) ** 2 for v, w in dist.atoms if v > t)
    ext = extremal_two_point(d, sigma)
    rhs = math.fsum(w * (v - t) ** 2 for v, w in ext.atoms if v > t)
    return lhs, rhs, lhs <= rhs + 1e-12
