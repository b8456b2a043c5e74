"""Monte Carlo soundness harness.

Paths are generated from counter-based Philox streams keyed by
(seed, path index), so an estimate is a pure function of (seed, trials)
no matter how the paths are sliced across threads.  Three increment
families cover the extremal lattice case, a censored heavy-tail case,
and a smooth bounded case; each satisfies X_i <= d, conditional mean
<= 0, conditional variance <= sigma_i^2 by construction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import SupermartingaleSpec

Z95 = 1.959963984540054

FAMILY_KINDS = ("two_point_extremal", "truncated_shifted", "bounded_uniform")


@dataclass(frozen=True)
class IncrementFamily:
    """Increment law selector.  drift applies to truncated_shifted only:
    the extra downward mean shift, in units of sigma_i."""

    kind: str
    drift: float = 0.1

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"kind must be one of {FAMILY_KINDS}")
        if math.isnan(self.drift) or self.drift < 0.0:
            raise ValueError("drift must be nonnegative")


def two_point_extremal() -> IncrementFamily:
    return IncrementFamily("two_point_extremal", 0.0)


def truncated_shifted(drift: float = 0.1) -> IncrementFamily:
    return IncrementFamily("truncated_shifted", drift)


def bounded_uniform() -> IncrementFamily:
    return IncrementFamily("bounded_uniform", 0.0)


def _family_params(spec: SupermartingaleSpec, family: IncrementFamily):
    sig = np.array(spec.sigmas)
    d = spec.d
    if family.kind == "two_point_extremal":
        a = (sig / d) ** 2
        return d, a * d, a / (1.0 + a)
    if family.kind == "truncated_shifted":
        # Laplace base with matching variance (scale sigma/sqrt(2)),
        # censored at d, then shifted down.  Censoring X at a constant
        # never increases the variance, and the shift leaves it alone,
        # so Var <= sigma_i^2 holds; the mean is strictly negative.
        return d, sig / math.sqrt(2.0), family.drift * sig
    half = np.minimum(math.sqrt(3.0) * sig, d)
    return d, half, None


def _draw_increments(rng, spec, family, params):
    n = spec.n
    if family.kind == "two_point_extremal":
        d, down, p_up = params
        u = rng.random(n)
        return np.where(u < p_up, d, -down)
    if family.kind == "truncated_shifted":
        d, scale, shift = params
        z = rng.laplace(0.0, 1.0, n) * scale
        return np.minimum(z, d) - shift
    _, half, _ = params
    return (2.0 * rng.random(n) - 1.0) * half


def step_conditional_mean(spec: SupermartingaleSpec, family: IncrementFamily, i: int) -> float:
    """Exact conditional mean of step i (steps are independent within
    each family, so this is just the marginal mean)."""
    if not (0 <= i < spec.n):
        raise ValueError("step index out of range")
    if family.kind == "truncated_shifted":
        s = spec.sigmas[i] / math.sqrt(2.0)
        # E min(Z, d) for Laplace(0, s) and d >= 0 is -(s/2) e^{-d/s}
        return -(s / 2.0) * math.exp(-spec.d / s) - family.drift * spec.sigmas[i]
    return 0.0


def _path_rng(seed: int, index: int):
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def _validate_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError("seed must be an integer")
    if not (0 <= seed < 2**64):
        raise ValueError("seed must fit in 64 bits")
    return int(seed)


def sample_path(
    spec: SupermartingaleSpec, family: IncrementFamily, seed: int
) -> tuple[float, float]:
    """One path's (S_n, max_{1<=k<=n} S_k), from the stream keyed
    (seed, 0); identical to path 0 of simulate_terminal(seed)."""
    seed = _validate_seed(seed)
    params = _family_params(spec, family)
    rng = _path_rng(seed, 0)
    c = np.cumsum(_draw_increments(rng, spec, family, params))
    return float(c[-1]), float(c.max())


def simulate_terminal(
    spec: SupermartingaleSpec,
    family: IncrementFamily,
    trials: int,
    seed: int,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Terminal sums and running maxima for `trials` paths.

    Path i draws from Philox keyed (seed, i); the output is identical
    for any thread count, which only changes how the index range is
    partitioned.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = _validate_seed(seed)
    params = _family_params(spec, family)
    S = np.empty(trials)
    M = np.empty(trials)

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            rng = _path_rng(seed, i)
            c = np.cumsum(_draw_increments(rng, spec, family, params))
            S[i] = c[-1]
            M[i] = c.max()

    if threads <= 1:
        fill(0, trials)
    else:
        block = (trials + threads - 1) // threads
        spans = [(k * block, min((k + 1) * block, trials)) for k in range(threads)]
        spans = [s for s in spans if s[0] < s[1]]
        with ThreadPoolExecutor(max_workers=len(spans)) as ex:
            list(ex.map(lambda s: fill(*s), spans))
    return S, M


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.  Always contains
    the plain estimate successes/trials."""
    if trials < 1 or not (0 <= successes <= trials):
        raise ValueError("need 0 <= successes <= trials, trials >= 1")
    ph = successes / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (ph + 0.5 * z2n) / denom
    half = z * math.sqrt(ph * (1.0 - ph) / trials + 0.25 * z2n / trials) / denom
    # The interval always contains ph mathematically; the min/max with
    # ph absorbs the one-ulp rounding spill at ph = 0 or 1.
    return max(0.0, min(center - half, ph)), min(1.0, max(center + half, ph))


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo tail estimate with a Wilson 95% confidence interval."""

    point: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    successes: int

    def __post_init__(self):
        if not (self.ci_low <= self.point <= self.ci_high):
            raise ValueError("confidence interval must contain the point estimate")

    @property
    def se(self) -> float:
        """Plain binomial standard error of the point estimate."""
        return math.sqrt(self.point * (1.0 - self.point) / self.trials)


def estimate_tail(
    spec: SupermartingaleSpec,
    family: IncrementFamily,
    y: float,
    trials: int,
    seed: int,
    use_max: bool = False,
    threads: int = 1,
) -> McEstimate:
    """P(S_n >= y) (or P(max_k S_k >= y) with use_max) estimated over
    `trials` paths; a pure function of (seed, trials)."""
    y = float(y)
    if math.isnan(y):
        raise ValueError("estimate_tail: NaN threshold")
    S, M = simulate_terminal(spec, family, trials, seed, threads=threads)
    vals = M if use_max else S
    k = int(np.count_nonzero(vals >= y))
    lo, hi = wilson_interval(k, trials)
    return McEstimate(
        point=k / trials, ci_low=lo, ci_high=hi, trials=trials, seed=seed, successes=k
    )


def estimates_from_samples(vals: np.ndarray, y: float, trials: int, seed: int) -> McEstimate:
    """McEstimate for one threshold from an existing sample array, so a
    sweep over thresholds reuses a single simulation."""
    k = int(np.count_nonzero(vals >= y))
    lo, hi = wilson_interval(k, trials)
    return McEstimate(
        point=k / trials, ci_low=lo, ci_high=hi, trials=trials, seed=seed, successes=k
    )


def tilt_to_martingale(x: float, cond_mean: float, d: float) -> float:
    """Map a supermartingale increment to the martingale coupling used
    in the reduction: with gamma = m/(m - d) in [0, 1),
    x -> (1 - gamma) x + gamma d.  Pathwise x <= result <= d."""
    x, cond_mean, d = float(x), float(cond_mean), float(d)
    if math.isnan(x) or math.isnan(cond_mean) or math.isnan(d):
        raise ValueError("tilt_to_martingale: NaN argument")
    if d <= 0.0:
        raise ValueError("d must be positive")
    if cond_mean > 0.0:
        raise ValueError("conditional mean must be nonpositive")
    if x > d:
        raise ValueError("increment exceeds its upper bound d")
    g = cond_mean / (cond_mean - d)
    return (1.0 - g) * x + g * d
