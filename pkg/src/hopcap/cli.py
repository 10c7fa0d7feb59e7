"""Command-line surface.

Subcommands: capacity (threshold computation), curve (landscape CSV),
solve (level-2 stationary point), simulate (retrieval Monte Carlo),
verify (self-check suite).  Single results are JSON documents embedding a
run manifest; curves are CSV with the manifest written alongside (sidecar
file next to --out, or the diagnostic stream).  Exit codes: 0 success,
1 usage error, 2 solver non-convergence, 3 verification failure.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import HopcapError
from .level1 import BasinKind, capacity_l1, curve_l1
from .level2 import (LiftingParams, capacity_ags_l2, capacity_glm_l2,
                     capacity_nlt_l2, curve_l2, solve_stationary_l2)
from .simulator import retrieval_experiment
from .specfun import make_rule
from .verify import run_verification

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_VERIFY_FAILED = 3

DEFAULT_QUAD_ORDER = 80


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1 (argparse defaults to 2, which is
    # reserved for solver non-convergence)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _manifest(command: str, params: dict, seed: int | None) -> dict:
    return {
        "command": command,
        "parameters": params,
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "master_seed": seed,
    }


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(lines: list[str], manifest: dict, out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
        sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")


def _params_dict(params: LiftingParams | None) -> dict:
    if params is None:
        return {"p2": 0.0, "q2": 0.0, "c2": 0.0, "gamma_sq": None, "nu": None}
    return {"p2": params.p2, "q2": params.q2, "c2": params.c2,
            "gamma_sq": params.gamma_sq, "nu": params.nu}


def _threads_default() -> int:
    env = os.environ.get("HOPCAP_THREADS")
    if env:
        try:
            val = int(env)
            if val >= 1:
                return val
        except ValueError:
            pass
        sys.stderr.write("warning: ignoring invalid HOPCAP_THREADS\n")
    return os.cpu_count() or 1


def cmd_capacity(args) -> int:
    basin = BasinKind(args.basin)
    manifest = _manifest("capacity", {
        "basin": args.basin, "level": args.level, "quad_order": args.quad_order,
        "tol": args.tol}, seed=None)
    if args.level == 1:
        sol = capacity_l1(basin)
        doc = {
            "basin": args.basin, "level": 1,
            "alpha_c": sol.alpha_c, "delta_hat": sol.delta_hat,
            # tables report the first level as p2 = q2 = 0, c2 -> 0
            "params": {"p2": 0.0, "q2": 0.0, "c2": 0.0,
                       "gamma_sq": sol.gamma_sq_hat, "nu": sol.nu_hat},
            "residuals": [sol.diagnostics.residual],
            "iterations": sol.diagnostics.iterations,
            "quad_order": args.quad_order,
            "converged": sol.diagnostics.converged,
            "manifest": manifest,
        }
        _emit_json(doc, args.out)
        return EXIT_OK if sol.diagnostics.converged else EXIT_NO_CONVERGENCE
    rule = make_rule(args.quad_order)
    solver = {BasinKind.AGS: capacity_ags_l2, BasinKind.NLT: capacity_nlt_l2,
              BasinKind.GLM: capacity_glm_l2}[basin]
    sol = solver(rule)
    converged = bool(sol.diagnostics.converged)
    doc = {
        "basin": args.basin, "level": 2,
        "alpha_c": sol.alpha_c, "delta_hat": sol.delta_hat,
        "params": _params_dict(sol.params),
        "residuals": [float(r) for r in np.atleast_1d(sol.residuals)],
        "iterations": sol.diagnostics.iterations,
        "quad_order": args.quad_order,
        "converged": converged,
        "collapsed": sol.collapsed,
        "manifest": manifest,
    }
    if basin is BasinKind.GLM and sol.extra:
        doc["half_branch_delta"] = sol.extra.get("half_branch_delta")
        doc["min_branch_collapsed"] = sol.extra.get("min_branch_collapsed")
    _emit_json(doc, args.out)
    return EXIT_OK if converged else EXIT_NO_CONVERGENCE


def _parse_delta_range(spec: str) -> tuple[float, float, int]:
    try:
        lo_s, hi_s, st_s = spec.split(":")
        lo, hi, steps = float(lo_s), float(hi_s), int(st_s)
    except ValueError as exc:
        raise HopcapError(f"bad --delta-range {spec!r}, want min:max:steps") from exc
    if not (0.0 <= lo < hi <= 0.5) or steps < 1:
        raise HopcapError("need 0 <= min < max <= 0.5 and steps >= 1")
    return lo, hi, steps


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def cmd_curve(args) -> int:
    lo, hi, steps = _parse_delta_range(args.delta_range)
    deltas = np.linspace(lo, hi, steps + 1)
    manifest = _manifest("curve", {
        "alpha": args.alpha, "level": args.level, "delta_range": args.delta_range,
        "quad_order": args.quad_order}, seed=None)
    lines = ["delta,xi,xi1,xi_tot"]
    if args.level == 1:
        for pt in curve_l1(args.alpha, deltas):
            lines.append(",".join(_fmt(v) for v in
                                  (pt.delta, pt.xi, pt.xi1, pt.xi_tot)))
    else:
        rule = make_rule(args.quad_order)
        pts = curve_l2(args.alpha, deltas, rule)
        for d, pt in zip(deltas, pts):
            if pt is None:
                sys.stderr.write(f"warning: level-2 solve failed at delta={d}\n")
                lines.append(f"{_fmt(float(d))},,,")
            else:
                lines.append(",".join(_fmt(v) for v in
                                      (pt.delta, pt.xi, pt.xi1, pt.xi_tot)))
    _emit_csv(lines, manifest, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    rule = make_rule(args.quad_order)
    init = None
    if args.p2 is not None:
        init = LiftingParams(p2=args.p2, q2=args.q2, c2=args.c2,
                             gamma_sq=args.gamma_sq, nu=args.nu)
    manifest = _manifest("solve", {
        "alpha": args.alpha, "delta": args.delta, "quad_order": args.quad_order,
        "tol": args.tol, "init": _params_dict(init) if init else None}, seed=None)
    sol = solve_stationary_l2(args.alpha, args.delta, init=init, rule=rule,
                              tol=args.tol)
    doc = {
        "alpha": args.alpha, "delta": args.delta,
        "params": _params_dict(sol.params),
        "psi": sol.psi,
        "residuals": [float(r) for r in np.atleast_1d(sol.residuals)],
        "iterations": sol.diagnostics.iterations,
        "converged": bool(sol.diagnostics.converged),
        "collapsed": sol.collapsed,
        "quad_order": args.quad_order,
        "manifest": manifest,
    }
    _emit_json(doc, args.out)
    return EXIT_OK if sol.diagnostics.converged else EXIT_NO_CONVERGENCE


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise HopcapError("--trials must be >= 1")
    if not 0.0 <= args.flip_frac < 0.5:
        raise HopcapError("--flip-frac must be in [0, 0.5)")
    manifest = _manifest("simulate", {
        "n": args.n, "alpha": args.alpha, "flip_frac": args.flip_frac,
        "trials": args.trials, "delta_tol": args.delta_tol,
        "max_sweeps": args.max_sweeps}, seed=args.seed)
    stats = retrieval_experiment(
        n=args.n, alpha=args.alpha, flip_frac=args.flip_frac,
        trials=args.trials, seed=args.seed, delta_tol=args.delta_tol,
        max_sweeps=args.max_sweeps, max_workers=_threads_default())
    doc = {
        "n": stats.n, "m": stats.m, "alpha": stats.alpha,
        "flip_frac": stats.flip_frac, "trials": stats.trials,
        "seed": stats.seed, "delta_tol": stats.delta_tol,
        "mean_overlap": stats.mean_overlap,
        "median_overlap": stats.median_overlap,
        "retrieval_fraction": stats.retrieval_fraction,
        "mean_sweeps": stats.mean_sweeps,
        "converged_fraction": stats.converged_fraction,
        "manifest": manifest,
    }
    if args.per_trial:
        rows = ["trial,final_overlap,sweeps,converged,final_energy"]
        for i, t in enumerate(stats.per_trial):
            rows.append(f"{i},{_fmt(t.final_overlap)},{t.sweeps_used},"
                        f"{int(t.converged)},{_fmt(t.final_energy)}")
        with open(args.per_trial, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(rows) + "\n")
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verification(quad_order=args.quad_order, seed=args.seed)
    for check in report.checks:
        sys.stdout.write(check.line() + "\n")
    if report.ok:
        sys.stdout.write("all checks passed\n")
        return EXIT_OK
    names = ", ".join(c.name for c in report.failing())
    sys.stdout.write(f"FAILED: {names}\n")
    return EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hopcap",
                     description="Hebbian-Hopfield associative capacity toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    cap = sub.add_parser("capacity", help="compute a capacity threshold",
                         parents=[], add_help=True)
    cap.add_argument("--basin", required=True, choices=["ags", "nlt", "glm"])
    cap.add_argument("--level", type=int, required=True, choices=[1, 2])
    cap.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER)
    cap.add_argument("--tol", type=float, default=1e-8)
    cap.add_argument("--out", default=None)
    cap.set_defaults(func=cmd_capacity)

    cur = sub.add_parser("curve", help="emit a landscape curve as CSV")
    cur.add_argument("--alpha", type=float, required=True)
    cur.add_argument("--level", type=int, required=True, choices=[1, 2])
    cur.add_argument("--delta-range", default="0:0.5:100",
                     help="min:max:steps (steps = number of intervals)")
    cur.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER)
    cur.add_argument("--out", default=None)
    cur.set_defaults(func=cmd_curve)

    sol = sub.add_parser("solve", help="solve the level-2 stationarity system")
    sol.add_argument("--alpha", type=float, required=True)
    sol.add_argument("--delta", type=float, required=True)
    sol.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER)
    sol.add_argument("--tol", type=float, default=1e-8)
    sol.add_argument("--p2", type=float, default=None, help="init value")
    sol.add_argument("--q2", type=float, default=None)
    sol.add_argument("--c2", type=float, default=None)
    sol.add_argument("--gamma-sq", dest="gamma_sq", type=float, default=None)
    sol.add_argument("--nu", type=float, default=None)
    sol.add_argument("--out", default=None)
    sol.set_defaults(func=cmd_solve)

    sim = sub.add_parser("simulate", help="retrieval-dynamics Monte Carlo")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--alpha", type=float, required=True)
    sim.add_argument("--flip-frac", type=float, default=0.05)
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--delta-tol", type=float, default=0.02)
    sim.add_argument("--max-sweeps", type=int, default=200)
    sim.add_argument("--per-trial", default=None, metavar="PATH")
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run the self-verification suite")
    ver.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve" and (args.p2 is None) != (args.nu is None):
        parser.error("init flags --p2/--q2/--c2/--gamma-sq/--nu come as a set")
    try:
        return args.func(args)
    except HopcapError as exc:
        sys.stderr.write(f"hopcap: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
