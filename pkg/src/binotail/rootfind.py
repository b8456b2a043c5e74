"""Plain bisection.  The monotone scalar problems in this package do not
warrant anything fancier, and bisection's determinism keeps every derived
constant reproducible to the last bit."""

from __future__ import annotations


def bisect_root(f, lo: float, hi: float, *, xtol: float, max_iter: int = 200) -> float:
    """Root of f on [lo, hi] to absolute tolerance xtol.

    Requires a sign change on the bracket (an exact zero at either end
    counts).  Keeps the invariant sign(f(lo)) != sign(f(hi)).
    """
    if not lo < hi:
        raise ValueError("bisect_root: empty bracket")
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError("bisect_root: no sign change on bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid == lo or mid == hi:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
