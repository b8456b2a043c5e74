"""Tail bounds for bounded-difference supermartingales.

The main bound multiplies the least log-concave majorant of the shifted
linear binomial tail by c_2 = e^2/2; the older comparison bound uses the
log-linear interpolant instead.  Both are evaluated in log space and
clipped to 1 only at the reporting boundary, so deep-tail values stay
meaningful through their log10 companions long after the linear
probability underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .binomial import LOG_ZERO, BinomialSpec, TailTable, build_tail_table, normal_tail
from .majorant import KnotLattice, build_knot_lattice, q_lc, q_linlc_shifted
from .rootfind import bisect_root

C2 = math.exp(2.0) / 2.0
C3 = 2.0 * math.exp(3.0) / 9.0

_LN10 = math.log(10.0)


def c_alpha(alpha: float) -> float:
    """Gamma(alpha + 1) (e/alpha)^alpha; c_1 = e, c_2 = e^2/2, c_3 = 2e^3/9.

    Above alpha ~ 100 both factors leave the comfortable float range, so
    the value is assembled in log space; accuracy degrades gracefully to
    ~1e-13 relative there.
    """
    alpha = float(alpha)
    if math.isnan(alpha) or not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if alpha <= 100.0:
        return math.gamma(alpha + 1.0) * (math.e / alpha) ** alpha
    return math.exp(math.lgamma(alpha + 1.0) + alpha * (1.0 - math.log(alpha)))


def _positive_finite(name: str, v: float) -> float:
    v = float(v)
    if math.isnan(v) or math.isinf(v) or v <= 0.0:
        raise ValueError(f"{name} must be positive and finite")
    return v


@dataclass(frozen=True)
class SupermartingaleSpec:
    """Problem data for S_k = X_1 + ... + X_k with per-step bounds
    X_i <= d and conditional variances at most sigma_i^2.

    The binomial comparison uses the averaged variance sigma2 = mean of
    sigma_i^2, the step scale h = d + sigma2/d, and the lattice success
    probability p = sigma2/(d^2 + sigma2).  A single d applies to every
    step; heterogeneous d_i have no comparison theorem here (use the
    Rademacher route when d_i = sigma_i is what varies).
    """

    n: int
    d: float
    sigmas: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "d", _positive_finite("d", self.d))
        sig = tuple(_positive_finite("sigma", s) for s in self.sigmas)
        if len(sig) != self.n:
            raise ValueError("need exactly n sigma values")
        object.__setattr__(self, "sigmas", sig)

    @classmethod
    def uniform(cls, n: int, d: float, sigma: float) -> "SupermartingaleSpec":
        return cls(n=n, d=d, sigmas=(float(sigma),) * n)

    @cached_property
    def sigma2(self) -> float:
        return math.fsum(s * s for s in self.sigmas) / self.n

    @cached_property
    def h(self) -> float:
        return self.d + self.sigma2 / self.d

    @cached_property
    def p(self) -> float:
        return self.sigma2 / (self.d * self.d + self.sigma2)

    @cached_property
    def q(self) -> float:
        return 1.0 - self.p

    @cached_property
    def b(self) -> float:
        return math.sqrt(math.fsum(max(self.d, s) ** 2 for s in self.sigmas))


@dataclass(frozen=True)
class RademacherSpec:
    """Problem data for the weighted-Rademacher style bound: per-step
    ranges d_i and variance proxies sigma_i, entering only through
    b = sqrt(sum max(d_i, sigma_i)^2)."""

    n: int
    d_list: tuple[float, ...]
    sigma_list: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError("n must be a positive integer")
        ds = tuple(_positive_finite("d_i", v) for v in self.d_list)
        ss = tuple(_positive_finite("sigma_i", v) for v in self.sigma_list)
        if len(ds) != self.n or len(ss) != self.n:
            raise ValueError("need exactly n values of d_i and sigma_i")
        object.__setattr__(self, "d_list", ds)
        object.__setattr__(self, "sigma_list", ss)

    @cached_property
    def b(self) -> float:
        return math.sqrt(
            math.fsum(max(d, s) ** 2 for d, s in zip(self.d_list, self.sigma_list))
        )


@lru_cache(maxsize=256)
def _tables(n: int, p: float) -> tuple[TailTable, KnotLattice]:
    table = build_tail_table(BinomialSpec(n, p))
    return table, build_knot_lattice(table)


def rescale(spec: SupermartingaleSpec, y: float) -> float:
    """Threshold y in sum units -> lattice coordinate x = (q/d) y + np."""
    y = float(y)
    if math.isnan(y):
        raise ValueError("rescale: NaN argument")
    return (spec.q / spec.d) * y + spec.n * spec.p


def rescale_inverse(spec: SupermartingaleSpec, x: float) -> float:
    """Lattice coordinate x -> threshold y = (x - np) d / q."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("rescale_inverse: NaN argument")
    return (x - spec.n * spec.p) * spec.d / spec.q


def _log_new(spec: SupermartingaleSpec, y: float) -> float:
    table, lattice = _tables(spec.n, spec.p)
    return math.log(C2) + q_linlc_shifted(table, lattice, rescale(spec, y))


def _log_old(spec: SupermartingaleSpec, y: float) -> float:
    table, _ = _tables(spec.n, spec.p)
    return math.log(C2) + q_lc(table, rescale(spec, y))


def theorem23_bound(spec: SupermartingaleSpec, y: float) -> float:
    """min(1, c_2 Q_maj((q/d) y + np)): valid for P(max_k S_k >= y), not
    just the terminal sum."""
    return min(1.0, math.exp(_log_new(spec, y)))


def old_bound(spec: SupermartingaleSpec, y: float) -> float:
    """min(1, c_2 Q_lc((q/d) y + np)): the log-linear comparison bound."""
    return min(1.0, math.exp(_log_old(spec, y)))


def truncation_bound(spec: SupermartingaleSpec, y: float, exceedance) -> float:
    """Bound without an a.s. upper bound on the increments: the sum of
    per-step exceedance probabilities P(X_i > d) plus the capped-
    increment bound.  exceedance is either that sum (scalar) or the
    per-step sequence; per-step entries must be probabilities."""
    if hasattr(exceedance, "__len__"):
        vals = [float(v) for v in exceedance]
        if len(vals) != spec.n:
            raise ValueError("need exactly n exceedance probabilities")
        if any(math.isnan(v) or v < 0.0 or v > 1.0 for v in vals):
            raise ValueError("exceedance probabilities must lie in [0, 1]")
        total = math.fsum(vals)
    else:
        total = float(exceedance)
        if math.isnan(total) or total < 0.0 or total > spec.n:
            raise ValueError("exceedance sum must lie in [0, n]")
    return min(1.0, total + math.exp(_log_new(spec, y)))


def rademacher_bound(spec: RademacherSpec, y: float) -> float:
    """min(1, c_3 Q_maj(y sqrt(n)/(2b) + n/2)) on the symmetric p = 1/2
    lattice; the third-order comparison constant c_3 = 2e^3/9 applies."""
    y = float(y)
    if math.isnan(y):
        raise ValueError("rademacher_bound: NaN argument")
    table, lattice = _tables(spec.n, 0.5)
    x = y * math.sqrt(spec.n) / (2.0 * spec.b) + spec.n / 2.0
    return min(1.0, C3 * math.exp(q_linlc_shifted(table, lattice, x)))


def gaussian_bound(b: float, y: float) -> float:
    """min(1, c_3 P(Z >= y/b)): the asymptotically sharp Gaussian form."""
    b = _positive_finite("b", b)
    y = float(y)
    if math.isnan(y):
        raise ValueError("gaussian_bound: NaN argument")
    return min(1.0, C3 * normal_tail(y / b))


def hoeffding_baseline(x: float) -> float:
    """exp(-x^2/2) for x >= 0, else 1: the classical normalized bound."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("hoeffding_baseline: NaN argument")
    if x <= 0.0:
        return 1.0
    return math.exp(-0.5 * x * x)


@lru_cache(maxsize=1)
def gaussian_hoeffding_crossover() -> float:
    """The x > 0 where c_3 P(Z >= x) = exp(-x^2/2).  The Gaussian form
    is larger left of the root and smaller right of it."""

    def f(x: float) -> float:
        return math.log(C3) + math.log(normal_tail(x)) + 0.5 * x * x

    return bisect_root(f, 1.0, 2.0, xtol=1e-12)


@dataclass(frozen=True)
class BoundReport:
    """One threshold's bounds, in linear and log10 form.

    Linear probabilities are clipped to [0, 1]; the log10 companions are
    computed before clipping and before linear underflow, so a bound of
    1e-400 reports as probability 0.0 with underflow_new set and a
    finite log10.  ratio = new/old before clipping, None past x = n
    where the old bound's interpolant vanishes.
    """

    y: float
    x: float
    new_bound: float
    old_bound: float
    gaussian_bound: float
    hoeffding_baseline: float
    log10_new: float
    log10_old: float
    log10_gaussian: float
    log10_hoeffding: float
    ratio: float | None
    clipped_new: bool
    clipped_old: bool
    underflow_new: bool
    underflow_old: bool


def _report_parts(log_raw: float) -> tuple[float, float, bool, bool]:
    raw = math.exp(log_raw)
    clipped = raw > 1.0
    linear = min(1.0, raw)
    log10 = min(0.0, log_raw / _LN10)
    underflow = linear == 0.0 and log_raw > LOG_ZERO
    return linear, log10, clipped, underflow


def bound_report(spec: SupermartingaleSpec, y: float) -> BoundReport:
    y = float(y)
    if math.isnan(y):
        raise ValueError("bound_report: NaN argument")
    x = rescale(spec, y)
    ln_new = _log_new(spec, y)
    ln_old = _log_old(spec, y)
    new, l10n, cn, un = _report_parts(ln_new)
    old, l10o, co, uo = _report_parts(ln_old)
    if x > spec.n:
        ratio: float | None = None
    else:
        ratio = math.exp(ln_new - ln_old)
    g = gaussian_bound(spec.b, y)
    hb = hoeffding_baseline(y / spec.b)
    return BoundReport(
        y=y,
        x=x,
        new_bound=new,
        old_bound=old,
        gaussian_bound=g,
        hoeffding_baseline=hb,
        log10_new=l10n,
        log10_old=l10o,
        log10_gaussian=LOG_ZERO if g == 0.0 else math.log10(g),
        log10_hoeffding=math.log10(hb) if hb > 0.0 else LOG_ZERO,
        ratio=ratio,
        clipped_new=cn,
        clipped_old=co,
        underflow_new=un,
        underflow_old=uo,
    )
