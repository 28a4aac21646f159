"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric or
domain failure.  Floats are written with ``%.15e`` so that repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, RuelleKitError
from .model import Params

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return "null"
    return "%.15e" % v


def dump_json(obj: Any, indent: int = 0) -> str:
    """JSON text with fixed key order and %.15e floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return "true" if obj is True else "false" if obj is False else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{dump_json(str(k))}: {dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dump_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            vals = [float(v) for v in np.linspace(lo, hi, n)]
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"malformed grid {text!r}") from None
    if not vals or any(not math.isfinite(v) or v <= 0 for v in vals):
        raise UsageError(f"grid values must be positive and finite: {text!r}")
    return vals


def _params(args, beta: float = 1.0) -> Params:
    try:
        return Params(args.gamma, args.delta, beta)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_pressure_scan(args) -> int:
    from concurrent.futures import ThreadPoolExecutor

    from .pressure import _thread_cap, solve_pressure_double

    betas = parse_grid(args.betas)
    _params(args)

    def one(b: float):
        try:
            return solve_pressure_double(Params(args.gamma, args.delta, b))
        except RuelleKitError as exc:
            return exc

    workers = _thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, betas))
    else:
        results = [one(b) for b in betas]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["beta", "lambda", "pressure", "residual"])
    status = EXIT_OK
    for b, r in zip(betas, results):
        if isinstance(r, Exception):
            wr.writerow([_fmt(b), "nan", "nan", f"error: {r}"])
            status = EXIT_NUMERIC
        else:
            wr.writerow([_fmt(b), _fmt(r.lam), _fmt(r.pressure), _fmt(r.residual)])
    _write(buf.getvalue(), args.out)
    return status


def cmd_critical_point(args) -> int:
    from .pressure import find_critical_beta

    if not (args.gamma > 1 and args.delta > 1):
        raise UsageError("exponents must exceed 1")
    r = find_critical_beta(args.gamma, args.delta, tol=args.tol)
    _write(dump_json({"beta_c": r.beta_c, "residual": r.residual, "iterations": r.iterations}) + "\n", None)
    return EXIT_OK


def cmd_tl_limits(args) -> int:
    from .model import parse_word
    from .renewal import limit_K, renewal_solution, tl_trajectory, tl_value_for_boundary, to_csv
    from .transfer import JacobianPotential, finite_volume_prob

    p = _params(args)
    for b in args.boundary:
        try:
            w = parse_word(b)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        if not w.is_infinite:
            raise UsageError(f"boundary {b!r} is not eventually periodic")
    k = limit_K(p, args.Q)
    sol = renewal_solution(p, args.Q, fast=args.fast)
    J = JacobianPotential(p)
    out: dict[str, Any] = {
        "gamma": p.gamma,
        "delta": p.delta,
        "Q": args.Q,
        "K": k.K,
        "numerator": k.numerator,
        "M": k.M,
        "numerator_direct": k.numerator_direct,
        "B_Q": float(sol.B[args.Q]),
        "abs_B_Q_minus_K": abs(float(sol.B[args.Q]) - k.K),
        "abs_A_Q_minus_K": abs(float(sol.A[args.Q]) - k.K),
        "boundaries": [],
    }
    horizon = min(args.finite, args.Q)
    for b in args.boundary:
        traj = tl_trajectory(p, b, horizon, sol)
        dev = 0.0
        oracle = []
        for n in range(0, min(args.oracle_depth, horizon) + 1):
            o = finite_volume_prob(J, b, n, "0")
            oracle.append(o)
            dev = max(dev, abs(o - traj[n]))
        out["boundaries"].append({
            "boundary": b,
            "limit": tl_value_for_boundary(p, b),
            "finite": [float(v) for v in traj],
            "oracle": oracle,
            "oracle_max_deviation": dev,
        })
    _write(dump_json(out) + "\n", args.out)
    if args.csv:
        _write(to_csv(sol), args.csv)
    return EXIT_OK


def cmd_correlation(args) -> int:
    from .correlation import decay_report, to_csv
    from .renewal import renewal_solution

    p = _params(args)
    sol = renewal_solution(p, args.Q, fast=args.fast)
    rep = decay_report(p, args.Q, tuple(args.window), sol=sol)
    payload = {
        "gamma": rep.gamma,
        "delta": rep.delta,
        "Q": rep.Q,
        "window": list(rep.window),
        "V01": {"slope": rep.slope_V01, "r_squared": rep.r2_V01, "claimed": rep.claimed_V01},
        "V10": {"slope": rep.slope_V10, "r_squared": rep.r2_V10, "claimed": rep.claimed_V10},
        "correlation": {"slope": rep.slope_corr, "r_squared": rep.r2_corr, "claimed": rep.claimed_corr},
        "V1": rep.V1,
        "findings": rep.findings,
    }
    _write(dump_json(payload) + "\n", args.out)
    if args.csv:
        _write(to_csv(p, args.Q, sol, stride=args.stride), args.csv)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import format_table, run_suite

    checks = run_suite(args.suite)
    print(format_table(checks))
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def cmd_eigen_dump(args) -> int:
    from .eigen import build_measure_table

    if not 1 <= args.depth <= 16:
        raise UsageError("depth must lie in 1..16")
    p = _params(args, args.beta)
    tab = build_measure_table(p, args.depth, kind=args.kind, normalize=not args.raw)
    keys = sorted(tab.entries, key=lambda k: (len(k), k))
    payload = {
        "params": p.as_dict(),
        "kind": args.kind,
        "normalized": tab.normalized,
        "entries": {k: tab.entries[k] for k in keys},
    }
    _write(dump_json(payload) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ruelle-kit", description="Double Hofbauer model toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def exps(sp, gamma=3.5, delta=3.0):
        sp.add_argument("--gamma", type=float, default=gamma)
        sp.add_argument("--delta", type=float, default=delta)

    sp = sub.add_parser("pressure-scan", help="pressure over a grid of inverse temperatures")
    exps(sp, 3.0, 2.5)
    sp.add_argument("--betas", default="0.5:0.999:20", help="start:stop:count or comma list")
    sp.add_argument("--out", default=None, help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_pressure_scan)

    sp = sub.add_parser("critical-point", help="locate the critical inverse temperature")
    exps(sp, 3.0, 2.5)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_critical_point)

    sp = sub.add_parser("tl-limits", help="thermodynamic limits for periodic boundaries")
    exps(sp)
    sp.add_argument("--boundary", nargs="+", default=["0*", "1*", "(011)*"])
    sp.add_argument("--Q", type=int, default=10**5)
    sp.add_argument("--finite", type=int, default=20, help="report finite-q values up to this q")
    sp.add_argument("--oracle-depth", type=int, default=16)
    sp.add_argument("--fast", action="store_true", help="FFT divide-and-conquer solver")
    sp.add_argument("--out", default=None)
    sp.add_argument("--csv", default=None, help="renewal arrays CSV path")
    sp.set_defaults(func=cmd_tl_limits)

    sp = sub.add_parser("correlation", help="decay exponents of correlations")
    exps(sp)
    sp.add_argument("--Q", type=int, default=10**5)
    sp.add_argument("--window", type=float, nargs=2, default=[1e3, 1e4])
    sp.add_argument("--fast", action="store_true")
    sp.add_argument("--out", default=None)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--stride", type=int, default=1)
    sp.set_defaults(func=cmd_correlation)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("suite", choices=["specfun", "model", "pressure", "eigen", "transfer",
                                      "renewal", "correlation", "all"])
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("eigen-dump", help="cylinder masses as JSON")
    exps(sp)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--kind", choices=["mu", "nu"], default="mu")
    sp.add_argument("--raw", action="store_true", help="skip normalization")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_eigen_dump)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    for name in ("Q", "finite", "oracle_depth", "stride"):
        if getattr(args, name, 1) < 1 and not (name == "oracle_depth" and args.oracle_depth == 0):
            ap.error(f"--{name.replace('_', '-')} must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ruelle-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuelleKitError, ArithmeticError, ValueError) as exc:
        print(f"ruelle-kit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
