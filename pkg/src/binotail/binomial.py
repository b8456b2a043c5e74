"""Log-domain binomial pmf and upper tails.

Everything downstream (majorants, bounds, dominance ratios) consumes the
TailTable built here.  Probability-like quantities are carried as natural
logs, with -inf encoding an exact zero: no entry in a table is ever an
underflowed finite float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

LOG_ZERO = float("-inf")

# Exact integer factorials below this size, lgamma above.  1025 keeps the
# import-time table cheap while covering every n the exact oracle accepts.
_TABLE_SIZE = 1025


def _factorial_log_table() -> np.ndarray:
    out = np.empty(_TABLE_SIZE)
    out[0] = 0.0
    f = 1
    for k in range(1, _TABLE_SIZE):
        f *= k
        out[k] = math.log(f)
    out.setflags(write=False)
    return out


_LOG_FACTORIAL = _factorial_log_table()


def log_factorial(k: int) -> float:
    """ln k!, correctly rounded from the exact integer for k < 1025."""
    if k < 0:
        raise ValueError("log_factorial: negative argument")
    if k < _TABLE_SIZE:
        return float(_LOG_FACTORIAL[k])
    return math.lgamma(k + 1.0)


def _log_factorials_upto(n: int) -> np.ndarray:
    if n < _TABLE_SIZE:
        return _LOG_FACTORIAL[: n + 1]
    out = np.empty(n + 1)
    out[:_TABLE_SIZE] = _LOG_FACTORIAL
    out[_TABLE_SIZE:] = [math.lgamma(k + 1.0) for k in range(_TABLE_SIZE, n + 1)]
    return out


@dataclass(frozen=True)
class BinomialSpec:
    """Binomial(n, p) problem handle.

    q is stored rather than recomputed so that p + q == 1 holds exactly
    everywhere downstream.  p_exact optionally carries a rational value
    of p (e.g. parsed from "3/100"); it only sharpens the floor guard in
    j_star and the exact-tail oracle, never the float pmf path.
    """

    n: int
    p: float
    p_exact: Fraction | None = None
    q: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValueError("n must be an integer")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        object.__setattr__(self, "n", int(self.n))
        if not (0.0 < self.p < 1.0):
            raise ValueError("p must lie strictly between 0 and 1")
        object.__setattr__(self, "q", 1.0 - self.p)
        # 1 - p rounds to within half an ulp of 1, so the identity below
        # cannot fail; it is cheap and guards the stored-q contract.
        if self.p + self.q != 1.0:
            raise ValueError("p + q must equal 1 exactly")
        if self.p_exact is not None:
            pe = Fraction(self.p_exact)
            if not (0 < pe < 1) or float(pe) != self.p:
                raise ValueError("p_exact must round to p")
            object.__setattr__(self, "p_exact", pe)

    @classmethod
    def from_ratio(cls, n: int, num: int, den: int) -> "BinomialSpec":
        r = Fraction(num, den)
        return cls(n, float(r), p_exact=r)

    def p_as_fraction(self) -> Fraction:
        return self.p_exact if self.p_exact is not None else Fraction(self.p)


def log_pmf(spec: BinomialSpec, j: int) -> float:
    """ln P(B = j) for B ~ Binomial(n, p).

    The term order below cancels exactly at j = 0 and j = n, so the
    endpoints come out as n ln q and n ln p with no residue.
    """
    if not isinstance(j, (int, np.integer)) or isinstance(j, bool):
        raise ValueError("j must be an integer")
    n = spec.n
    if not (0 <= j <= n):
        raise ValueError(f"j must lie in [0, {n}]")
    return (
        (log_factorial(n) - log_factorial(j))
        - log_factorial(n - j)
        + j * math.log(spec.p)
        + (n - j) * math.log(spec.q)
    )


def j_star(spec: BinomialSpec) -> int:
    """First index at which the pmf strictly decreases: floor((n+1)p) + 1.

    floor is discontinuous, so when (n+1)p lands within 1e-9 of an
    integer the floor is retaken on the exact rational value of p (the
    supplied ratio if there is one, else the float's own value).
    """
    v = (spec.n + 1) * spec.p
    if abs(v - round(v)) < 1e-9:
        exact = (spec.n + 1) * spec.p_as_fraction()
        return math.floor(exact) + 1
    return math.floor(v) + 1


@dataclass(frozen=True, eq=False)
class TailTable:
    """Log pmf and log upper tails of one Binomial(n, p).

    log_pmf[j] = ln P(B = j) for j = 0..n.
    log_tail[j] = ln P(B >= j) for j = 0..n+1, with log_tail[0] = 0.0 and
    log_tail[n+1] = -inf exactly.  Arrays are read-only.
    """

    spec: BinomialSpec
    log_pmf: np.ndarray
    log_tail: np.ndarray
    j_star: int

    @property
    def n(self) -> int:
        return self.spec.n


def build_tail_table(spec: BinomialSpec) -> TailTable:
    n = spec.n
    lf = _log_factorials_upto(n)
    j = np.arange(n + 1)
    lp = (
        (lf[n] - lf)
        - lf[::-1]
        + j * math.log(spec.p)
        + (n - j) * math.log(spec.q)
    )
    # Accumulate the tail from the top so the smallest terms enter the
    # running sum first; then clamp the float spill above total mass one.
    lt = np.empty(n + 2)
    lt[:-1] = np.logaddexp.accumulate(lp[::-1])[::-1]
    lt[-1] = LOG_ZERO
    np.minimum(lt, 0.0, out=lt)
    lt[0] = 0.0
    lp.setflags(write=False)
    lt.setflags(write=False)
    return TailTable(spec=spec, log_pmf=lp, log_tail=lt, j_star=j_star(spec))


_SQRT2 = math.sqrt(2.0)


def normal_tail(x: float) -> float:
    """P(Z >= x) for standard normal Z, via erfc.  Good to ~1e-16 abs."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("normal_tail: NaN argument")
    return 0.5 * math.erfc(x / _SQRT2)
