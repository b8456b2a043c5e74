"""Command-line interface.

Subcommands: constants, bound, sweep, compare, verify, oracle-check.
Every run is a pure function of its arguments plus the seed: repeated
invocations produce byte-identical output, including under different
--threads values (threading only re-partitions the path index range).

Exit codes: 0 success, 1 usage or domain error, 2 Monte Carlo
verification failure, 3 oracle mismatch.

Output formats: json (single object with keys command, inputs, results),
csv (header row, "." decimal point, empty field for undefined, "-inf"
for exactly-zero log values), table (aligned, 12 significant digits).
JSON carries non-finite floats as the strings "inf"/"-inf" and None for
undefined entries.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .binomial import LOG_ZERO, BinomialSpec, build_tail_table
from .bounds import (
    C2,
    C3,
    SupermartingaleSpec,
    bound_report,
    old_bound,
    rescale_inverse,
    theorem23_bound,
    truncation_bound,
)
from .comparison import comparison_constants, dominance_all_x, j_double_star, ratio_r
from .majorant import build_knot_lattice, grid_log_lc, grid_log_majorant
from .oracle import concave_hull_majorant, exact_log_tail, majorant_samples
from .simulate import FAMILY_KINDS, IncrementFamily, estimates_from_samples, simulate_terminal

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_ORACLE = 3

_LN10 = math.log(10.0)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand run depends on.  threads is execution
    detail, never echoed in output."""

    command: str
    n: int | None = None
    p: float | None = None
    p_exact: Fraction | None = None
    d: float | None = None
    sigmas: tuple[float, ...] | None = None
    xs: tuple[float, ...] | None = None
    ys: tuple[float, ...] | None = None
    grid: tuple[float, float, float] | None = None
    families: tuple[str, ...] = FAMILY_KINDS
    trials: int = 10000
    seed: int = 1234
    threads: int = 1
    step: float = 1e-3
    exceedance: float = 0.0
    fmt: str = "json"
    out: str | None = None


def _parse_p(text: str) -> tuple[float, Fraction | None]:
    if "/" in text:
        num, den = text.split("/", 1)
        r = Fraction(int(num), int(den))
        return float(r), r
    return float(text), None


def _parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise _UsageError("grid must look like start:stop:step")
    start, stop, step = (float(v) for v in parts)
    if not (step > 0.0 and stop >= start):
        raise _UsageError("grid needs step > 0 and stop >= start")
    if (stop - start) / step > 2e6:
        raise _UsageError("grid too fine: over 2e6 points")
    return start, stop, step


def _grid_values(grid: tuple[float, float, float]) -> np.ndarray:
    start, stop, step = grid
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + np.arange(count) * step


def _problem(cfg: RunConfig) -> tuple[SupermartingaleSpec, BinomialSpec]:
    """The working supermartingale spec and the binomial spec keyed by
    the user's own p when one was given.

    A bare (n, p) problem is canonicalized to d = 1, sigma_i =
    sqrt(p/q): the unique scale-1 problem whose comparison lattice is
    Binomial(n, p)."""
    n = cfg.n
    if cfg.p is not None:
        sigma = math.sqrt(cfg.p / (1.0 - cfg.p))
        mspec = SupermartingaleSpec.uniform(n, 1.0, sigma)
        bspec = BinomialSpec(n, cfg.p, p_exact=cfg.p_exact)
    else:
        mspec = SupermartingaleSpec(n=n, d=cfg.d, sigmas=cfg.sigmas)
        bspec = BinomialSpec(n, mspec.p)
    return mspec, bspec


def _fnum(v):
    """JSON-safe value: floats keep full repr precision, non-finite
    floats become strings, None passes through."""
    if v is None:
        return None
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _table_cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "-"
        return "%.12g" % v
    return str(v)


def _render(cfg: RunConfig, inputs: dict, results: dict, rows: list[dict] | None) -> str:
    if cfg.fmt == "json":
        payload = {"command": cfg.command, "inputs": inputs, "results": results}
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if rows is None:
        rows = [{"key": k, "value": v} for k, v in results.items()]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        cols = list(rows[0].keys()) if rows else []
        buf.write(",".join(cols) + "\n")
        for r in rows:
            buf.write(",".join(_csv_cell(r[c]) for c in cols) + "\n")
        return buf.getvalue()
    # table
    cols = list(rows[0].keys()) if rows else []
    cells = [[_table_cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _problem_inputs(cfg: RunConfig) -> dict:
    inputs: dict = {"n": cfg.n}
    if cfg.p is not None:
        inputs["p"] = cfg.p
    else:
        inputs["d"] = cfg.d
        inputs["sigmas"] = list(cfg.sigmas)
    return inputs


def run_constants(cfg: RunConfig) -> tuple[str, int]:
    cc = comparison_constants()
    names = [
        ("u_star", cc.u_star),
        ("u_double_star", cc.u_double_star),
        ("inv_u_double_star", 1.0 / cc.u_double_star),
        ("alpha_star", cc.alpha_star),
        ("r_alpha_star", cc.r_alpha_star),
        ("exp_r_minus_one", cc.exp_r_minus_one),
        ("c2", C2),
        ("c3", C3),
    ]
    results = {k: _fnum(v) for k, v in names}
    rows = [{"name": k, "value": v} for k, v in names]
    return _render(cfg, {}, results, rows), EXIT_OK


def _report_row(rep) -> dict:
    return {
        "y": rep.y,
        "x": rep.x,
        "q_new": rep.new_bound,
        "q_old": rep.old_bound,
        "q_gaussian": rep.gaussian_bound,
        "q_hoeffding": rep.hoeffding_baseline,
        "log10_q_new": rep.log10_new,
        "log10_q_old": rep.log10_old,
        "log10_q_gaussian": rep.log10_gaussian,
        "log10_q_hoeffding": rep.log10_hoeffding,
        "r": rep.ratio,
        "clipped_new": rep.clipped_new,
        "clipped_old": rep.clipped_old,
    }


def run_bound(cfg: RunConfig) -> tuple[str, int]:
    mspec, _ = _problem(cfg)
    if cfg.ys is not None:
        ys = list(cfg.ys)
    else:
        ys = [rescale_inverse(mspec, x) for x in cfg.xs]
    reports = [bound_report(mspec, y) for y in ys]
    rows = [_report_row(r) for r in reports]
    inputs = _problem_inputs(cfg)
    if cfg.ys is not None:
        inputs["y"] = list(cfg.ys)
    else:
        inputs["x"] = list(cfg.xs)
    results = {"reports": [{k: _fnum(v) for k, v in r.items()} for r in rows]}
    return _render(cfg, inputs, results, rows), EXIT_OK


def run_sweep(cfg: RunConfig) -> tuple[str, int]:
    _, bspec = _problem(cfg)
    table = build_tail_table(bspec)
    lattice = build_knot_lattice(table)
    xs = _grid_values(cfg.grid)
    lm = grid_log_majorant(table, lattice, xs)
    ll = grid_log_lc(table, xs)
    lnc2 = math.log(C2)
    log_new = lnc2 + lm
    log_old = lnc2 + ll
    q_new = np.exp(np.minimum(log_new, 0.0))
    q_old = np.exp(np.minimum(log_old, 0.0))
    l10_new = np.minimum(log_new, 0.0) / _LN10
    l10_old = np.minimum(log_old, 0.0) / _LN10
    n = bspec.n
    rows = []
    for i, x in enumerate(xs.tolist()):
        r = math.exp(lm[i] - ll[i]) if x <= n else None
        rows.append(
            {
                "x": x,
                "r": r,
                "q_new": float(q_new[i]),
                "q_old": float(q_old[i]),
                "log10_q_new": float(l10_new[i]),
                "log10_q_old": float(l10_old[i]),
            }
        )
    inputs = _problem_inputs(cfg)
    inputs["grid"] = {"start": cfg.grid[0], "stop": cfg.grid[1], "step": cfg.grid[2]}
    results = {"rows": [{k: _fnum(v) for k, v in r.items()} for r in rows]}
    return _render(cfg, inputs, results, rows), EXIT_OK


def run_compare(cfg: RunConfig) -> tuple[str, int]:
    _, bspec = _problem(cfg)
    table = build_tail_table(bspec)
    lattice = build_knot_lattice(table)
    jdd = j_double_star(bspec.n, bspec.p)
    dom = dominance_all_x(bspec.n, bspec.p)
    n_limit = (bspec.p / bspec.q) / comparison_constants().u_double_star
    ratios = [
        {"x": x, "r": ratio_r(table, lattice, x)} for x in (cfg.xs or ())
    ]
    results = {
        "j_star": table.j_star,
        "j_double_star": jdd,
        "dominance_all_x": dom,
        "n_limit_all_x": _fnum(n_limit),
        "ratios": [{k: _fnum(v) for k, v in r.items()} for r in ratios],
    }
    rows = [
        {"quantity": "j_star", "value": table.j_star},
        {"quantity": "j_double_star", "value": jdd},
        {"quantity": "dominance_all_x", "value": dom},
        {"quantity": "n_limit_all_x", "value": n_limit},
    ] + [{"quantity": f"r({r['x']:g})", "value": r["r"]} for r in ratios]
    return _render(cfg, _problem_inputs(cfg), results, rows), EXIT_OK


def _default_verify_thresholds(mspec: SupermartingaleSpec, bspec: BinomialSpec) -> list[float]:
    """Lattice thresholds whose exact tails span the estimable range."""
    table = build_tail_table(bspec)
    lo, hi = math.log(1e-4), math.log(0.9)
    js = [j for j in range(1, bspec.n + 1) if lo <= table.log_tail[j] <= hi]
    if not js:
        js = [1]
    if len(js) > 6:
        pick = np.linspace(0, len(js) - 1, 6).round().astype(int)
        js = [js[i] for i in sorted(set(pick.tolist()))]
    return [rescale_inverse(mspec, float(j)) for j in js]


def run_verify(cfg: RunConfig) -> tuple[str, int]:
    mspec, bspec = _problem(cfg)
    ys = list(cfg.ys) if cfg.ys is not None else _default_verify_thresholds(mspec, bspec)
    rows = []
    failed = False
    for fi, kind in enumerate(cfg.families):
        family = IncrementFamily(kind, 0.1 if kind == "truncated_shifted" else 0.0)
        S, M = simulate_terminal(
            mspec, family, cfg.trials, cfg.seed + fi, threads=cfg.threads
        )
        for stat, vals in (("sum", S), ("max", M)):
            for y in ys:
                est = estimates_from_samples(vals, y, cfg.trials, cfg.seed + fi)
                b_new = theorem23_bound(mspec, y)
                b_old = old_bound(mspec, y)
                b_tr = truncation_bound(mspec, y, 0.0)
                slack = est.point - 3.0 * est.se
                ok = slack <= min(b_new, b_old, b_tr)
                failed = failed or not ok
                rows.append(
                    {
                        "family": kind,
                        "stat": stat,
                        "y": y,
                        "estimate": est.point,
                        "ci_low": est.ci_low,
                        "ci_high": est.ci_high,
                        "bound_new": b_new,
                        "bound_old": b_old,
                        "bound_trunc": b_tr,
                        "sound": ok,
                    }
                )
    inputs = _problem_inputs(cfg)
    inputs.update(
        {
            "families": list(cfg.families),
            "trials": cfg.trials,
            "seed": cfg.seed,
            "y": ys,
        }
    )
    results = {
        "rows": [{k: _fnum(v) for k, v in r.items()} for r in rows],
        "all_sound": not failed,
    }
    text = _render(cfg, inputs, results, rows)
    return text, EXIT_VERIFY if failed else EXIT_OK


def run_oracle_check(cfg: RunConfig) -> tuple[str, int]:
    _, bspec = _problem(cfg)
    table = build_tail_table(bspec)
    lattice = build_knot_lattice(table)
    xs, logv = majorant_samples(table, lattice, cfg.step)
    hull = concave_hull_majorant(xs, logv)
    hv = hull(xs)
    mv = grid_log_majorant(table, lattice, xs)
    finite = np.isfinite(hv) & np.isfinite(mv)
    zero_mismatch = bool(np.any(np.isneginf(hv) != np.isneginf(mv)))
    hull_disc = float(np.abs(hv[finite] - mv[finite]).max())
    # Independent exact-tail route, in the log domain.
    max_rel = 0.0
    for j in range(bspec.n + 1):
        ref = exact_log_tail(bspec, j)
        have = float(table.log_tail[j])
        # relative in the log for large magnitudes, absolute near zero:
        # a log near 0 belongs to a tail near 1, where the absolute log
        # difference is itself the relative error of the tail
        err = abs(have - ref) / max(1.0, abs(ref))
        max_rel = max(max_rel, err)
    hull_ok = hull_disc <= 1e-6 and not zero_mismatch
    tail_ok = max_rel <= 1e-12
    results = {
        "samples": int(xs.size),
        "hull_max_abs_log_discrepancy": _fnum(hull_disc),
        "hull_zero_region_mismatch": zero_mismatch,
        "tail_max_rel_log_error": _fnum(max_rel),
        "hull_ok": hull_ok,
        "tail_ok": tail_ok,
        "pass": hull_ok and tail_ok,
    }
    inputs = _problem_inputs(cfg)
    inputs["step"] = cfg.step
    text = _render(cfg, inputs, results, None)
    return text, EXIT_OK if (hull_ok and tail_ok) else EXIT_ORACLE


_RUNNERS = {
    "constants": run_constants,
    "bound": run_bound,
    "sweep": run_sweep,
    "compare": run_compare,
    "verify": run_verify,
    "oracle-check": run_oracle_check,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="binotail", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, problem=True, fmt_default="json"):
        p.add_argument("--format", choices=("json", "csv", "table"), default=fmt_default)
        p.add_argument("--out", default=None, help="write output to this path instead of stdout")
        if problem:
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--p", default=None, help="success probability, float or num/den ratio")
            p.add_argument("--d", type=float, default=None, help="a.s. upper bound on increments")
            p.add_argument("--sigma", type=float, nargs="+", default=None,
                           help="per-step sigma values (one value is broadcast to all n steps)")

    p = sub.add_parser("constants", help="solved constants and c_alpha values")
    add_common(p, problem=False, fmt_default="table")

    p = sub.add_parser("bound", help="tail bounds at given thresholds")
    add_common(p)
    p.add_argument("--x", type=float, nargs="+", default=None, help="lattice coordinates")
    p.add_argument("--y", type=float, nargs="+", default=None, help="sum-scale thresholds")

    p = sub.add_parser("sweep", help="bound and ratio columns over an x grid")
    add_common(p, fmt_default="csv")
    p.add_argument("--grid", required=True, help="start:stop:step over lattice coordinate x")

    p = sub.add_parser("compare", help="dominance indices and pointwise ratios")
    add_common(p)
    p.add_argument("--x", type=float, nargs="+", default=None)

    p = sub.add_parser("verify", help="Monte Carlo soundness check")
    add_common(p, fmt_default="table")
    p.add_argument("--y", type=float, nargs="+", default=None)
    p.add_argument("--families", default=",".join(FAMILY_KINDS),
                   help="comma-separated subset of " + ",".join(FAMILY_KINDS))
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; has no effect on the output bytes")

    p = sub.add_parser("oracle-check", help="cross-check against the hull and exact-tail oracles")
    add_common(p)
    p.add_argument("--step", type=float, default=1e-3)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cmd = args.command
    kw: dict = {"command": cmd, "fmt": args.format, "out": args.out}
    if cmd != "constants":
        p_val, p_exact = (None, None)
        if args.p is not None:
            try:
                p_val, p_exact = _parse_p(args.p)
            except (ValueError, ZeroDivisionError) as e:
                raise _UsageError(f"bad --p value: {e}")
        has_ds = args.d is not None or args.sigma is not None
        if p_val is not None and has_ds:
            raise _UsageError("give either --p or --d/--sigma, not both")
        if p_val is None and not (args.d is not None and args.sigma is not None):
            raise _UsageError("need --p, or both --d and --sigma")
        if args.n is None or args.n < 1:
            raise _UsageError("need --n >= 1")
        kw["n"] = args.n
        if p_val is not None:
            if not (0.0 < p_val < 1.0):
                raise _UsageError("--p must lie strictly between 0 and 1")
            kw["p"] = p_val
            kw["p_exact"] = p_exact
        else:
            sig = tuple(args.sigma)
            if len(sig) == 1:
                sig = sig * args.n
            kw["d"] = args.d
            kw["sigmas"] = sig
    if cmd == "bound":
        if (args.x is None) == (args.y is None):
            raise _UsageError("give exactly one of --x or --y")
        if args.y is not None and kw.get("p") is not None:
            raise _UsageError("--y needs the --d/--sigma form; use --x with --p")
        kw["xs"] = tuple(args.x) if args.x is not None else None
        kw["ys"] = tuple(args.y) if args.y is not None else None
    if cmd == "sweep":
        kw["grid"] = _parse_grid(args.grid)
    if cmd == "compare":
        kw["xs"] = tuple(args.x) if args.x is not None else None
    if cmd == "verify":
        fams = tuple(f.strip() for f in args.families.split(",") if f.strip())
        bad = [f for f in fams if f not in FAMILY_KINDS]
        if bad or not fams:
            raise _UsageError(f"unknown families: {','.join(bad) or '(none)'}")
        if args.trials < 1:
            raise _UsageError("--trials must be >= 1")
        if args.threads < 1:
            raise _UsageError("--threads must be >= 1")
        kw.update(
            families=fams,
            trials=args.trials,
            seed=args.seed,
            threads=args.threads,
            ys=tuple(args.y) if args.y is not None else None,
        )
    if cmd == "oracle-check":
        kw["step"] = args.step
    return RunConfig(**kw)


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _config_from_args(args)
        text, code = _RUNNERS[cfg.command](cfg)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out is not None:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
