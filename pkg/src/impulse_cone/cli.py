"""Command-line interface.

    impulse-cone constants <spec.toml> [--json]
    impulse-cone check     <spec.toml> [--rho1 R --rho2 R] [--f-sup V] [--f-inf V] [--json]
    impulse-cone solve     <spec.toml> [--out FILE] [--rho1 R --rho2 R] [--json] [--seed N]
    impulse-cone verify    <spec.toml> <solution.csv> [--json]

Exit codes: 0 success / certified / verified, 2 honest negative outcome
(no hypothesis pair, solver failed, verification out of tolerance),
1 input or validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import conditions, shooting, solver
from .errors import (
    EvalDomainError,
    ExprSyntaxError,
    GammaBoundError,
    InvalidSpecError,
    QuadratureAccuracyError,
)
from .hammerstein import ProblemSpec, apply_T
from .pcfun import PCFunction
from .specfile import LoadedProblem, load_problem

VERIFY_TOL = 1e-6
FALLBACK_BAND = (0.1, 10.0)

_USER_ERRORS = (InvalidSpecError, ExprSyntaxError, EvalDomainError,
                QuadratureAccuracyError, FileNotFoundError, IsADirectoryError,
                PermissionError, UnicodeDecodeError)


# ---------------------------------------------------------------------------
# solution CSV

def write_solution_csv(u: PCFunction, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "side", "u"])
        for t, side, v in u.rows():
            writer.writerow([repr(t), side, repr(v)])


def read_solution_csv(path, spec: ProblemSpec) -> PCFunction:
    """Rebuild the nodal function; jump pairs must match the problem's
    impulse times exactly."""
    ts, sides, vals = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t", "side", "u"]:
            raise InvalidSpecError(f"{path}: expected header 't,side,u'")
        for row in reader:
            if not row:
                continue
            if len(row) < 3:
                raise InvalidSpecError(f"{path}: short row {row!r}")
            ts.append(float(row[0]))
            sides.append(row[1].strip())
            vals.append(float(row[2]))
    jumps = []
    for i, side in enumerate(sides):
        if side == "L":
            if i + 1 >= len(ts) or sides[i + 1] != "R" or ts[i + 1] != ts[i]:
                raise InvalidSpecError(
                    f"{path}: jump node at t={ts[i]} lacks its L/R pair")
            jumps.append(ts[i])
        elif side == "R":
            if i == 0 or sides[i - 1] != "L":
                raise InvalidSpecError(
                    f"{path}: stray R node at t={ts[i]}")
        elif side not in ("", ".", "·"):
            raise InvalidSpecError(f"{path}: bad side marker {side!r}")
    if tuple(jumps) != spec.jumps:
        raise InvalidSpecError(
            f"{path}: jump pairs at {jumps} do not match the problem's "
            f"impulse times {list(spec.jumps)}")
    try:
        return PCFunction(np.asarray(ts), np.asarray(vals), jumps)
    except ValueError as err:
        raise InvalidSpecError(f"{path}: {err}") from None


# ---------------------------------------------------------------------------
# shared rendering

def _print_constants(spec, an, rho_ref: float = 1.0):
    pc = an.constants
    th = an.thresholds()
    print("constants:")
    print(f"  m            = {pc.m!r}")
    print(f"  M(a,b)       = {pc.M!r}")
    print(f"  Gamma        = {pc.Gamma!r}" + ("   ** WARNING: Gamma >= 1, "
          "index-1 side unavailable **" if pc.Gamma >= 1 else ""))
    print(f"  int K g      = {pc.int_K_g!r}")
    print(f"  c            = {pc.c!r}  (c1 = {spec.kernel.c1!r}, c2 = {spec.kernel.c2!r})")
    print(f"  ||gamma||    = {pc.norm_gamma!r}")
    print(f"  A0           = {pc.A0!r}")
    print(f"  alpha0({rho_ref:g})    = {an.alpha0(rho_ref)!r}")
    if pc.Gamma < 1:
        print(f"  i1 coefficient = {pc.i1_coefficient()!r}")
        print(f"thresholds (A0=0 form): f_sup <= {th['f_sup_max']!r}, "
              f"f_inf >= {th['f_inf_min']!r}")


def _constants_dict(spec, an) -> dict:
    d = an.constants.to_dict()
    d["c1"] = spec.kernel.c1
    d["c2"] = spec.kernel.c2
    d["alpha0_at_1"] = an.alpha0(1.0)
    d["thresholds"] = an.thresholds()
    return d


def _emit_json(payload: dict):
    print(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# commands

def cmd_constants(loaded: LoadedProblem, args) -> int:
    an = loaded.spec.analysis(loaded.numerics.quad_tol)
    if args.json:
        _emit_json({"constants": _constants_dict(loaded.spec, an),
                    "conditions": None, "solution_meta": None, "residuals": None})
    else:
        _print_constants(loaded.spec, an)
    return 0


def _render_check(report, as_json: bool) -> int:
    if as_json:
        _emit_json({"constants": report.constants.to_dict(),
                    "conditions": report.to_dict(),
                    "solution_meta": None, "residuals": None})
    else:
        for chk in report.index1:
            state = "holds" if chk.holds else "fails"
            extra = " (marginal)" if chk.marginal else ""
            print(f"index-1 at rho={chk.rho:g}: lhs={chk.lhs!r} {state}{extra} "
                  f"[f bound {chk.f_bound!r}, {chk.f_bound_source}]")
        for chk in report.index0:
            state = "holds" if chk.holds else "fails"
            extra = " (marginal)" if chk.marginal else ""
            print(f"index-0 at rho={chk.rho:g}: lhs={chk.lhs!r} {state}{extra} "
                  f"[f bound {chk.f_bound!r}, {chk.f_bound_source}]")
        if report.certified:
            v = report.verdict
            print(f"CERTIFIED {v.kind}: rho1={v.rho1:g}, rho2={v.rho2:g} "
                  f"-> a positive solution exists in the cone")
        else:
            print("not certified: no hypothesis pair found")
        for note in report.notes:
            print(f"note: {note}")
    return 0 if report.certified else 2


def cmd_check(loaded: LoadedProblem, args) -> int:
    spec = loaded.spec
    if (args.rho1 is None) != (args.rho2 is None):
        print("error: provide both --rho1 and --rho2 or neither", file=sys.stderr)
        return 1
    try:
        if args.rho1 is not None:
            report = conditions.check_pair(spec, args.rho1, args.rho2,
                                           f_sup_bound=args.f_sup,
                                           f_inf_bound=args.f_inf)
        else:
            report = conditions.find_H(spec)
    except GammaBoundError as err:
        print(f"not certified: {err}", file=sys.stderr)
        return 2
    return _render_check(report, args.json)


def _solve_band(spec, args):
    if args.rho1 is not None and args.rho2 is not None:
        return args.rho1, args.rho2, "explicit"
    try:
        report = conditions.find_H(spec)
    except GammaBoundError:
        report = None
    if report is not None and report.certified:
        return report.verdict.rho1, report.verdict.rho2, report.verdict.kind
    return FALLBACK_BAND[0], FALLBACK_BAND[1], "fallback (existence not certified)"


def cmd_solve(loaded: LoadedProblem, args) -> int:
    spec = loaded.spec
    num = loaded.numerics
    if (args.rho1 is None) != (args.rho2 is None):
        print("error: provide both --rho1 and --rho2 or neither", file=sys.stderr)
        return 1
    rho1, rho2, band_kind = _solve_band(spec, args)
    result = solver.multi_start(
        spec, rho1, rho2, n_starts=num.n_starts, damping=num.damping,
        max_iter=num.max_iter, tol=num.solve_tol, quad_tol=num.quad_tol,
        n_per_piece=num.nodes_per_piece)
    if not result.success:
        print(f"solve failed over band [{rho1:g}, {rho2:g}] ({band_kind}):",
              file=sys.stderr)
        for label, run in result.attempts:
            print(f"  start {label}: {run}", file=sys.stderr)
        if args.json:
            _emit_json({"constants": None, "conditions": None,
                        "solution_meta": {"success": False,
                                          "band": [rho1, rho2],
                                          "band_kind": band_kind},
                        "residuals": None})
        return 2
    run = result.solution
    u = run.u
    out = args.out or (Path(loaded.path).with_suffix(".solution.csv")
                       if loaded.path else Path("solution.csv"))
    write_solution_csv(u, out)
    jump_info = []
    for imp in spec.impulses:
        size = u.jump(imp.tau)
        expect = imp.fn(u.eval(imp.tau, "left"))
        jump_info.append({"tau": imp.tau, "jump": size,
                          "I_of_left_value": expect,
                          "error": abs(size - expect)})
    residuals = {
        "operator": run.residual,
        "u_at_1": abs(u.eval(1.0)),
        "boundary": abs(u.eval(0.0) - spec.boundary(u)),
        "jumps": jump_info,
    }
    meta = {"success": True, "band": [rho1, rho2], "band_kind": band_kind,
            "method": run.method, "iterations": run.iterations,
            "sup_norm": u.sup_norm(), "cone_margin": run.cone_margin,
            "nodes": int(u.grid.size), "out_csv": str(out)}
    if args.json:
        _emit_json({"constants": None, "conditions": None,
                    "solution_meta": meta, "residuals": residuals})
    else:
        print(f"solved over band [{rho1:g}, {rho2:g}] ({band_kind}) "
              f"via {run.method} in {run.iterations} iterations")
        print(f"  residual     = {run.residual!r}")
        print(f"  sup norm     = {u.sup_norm()!r}")
        print(f"  cone margin  = {run.cone_margin!r}")
        print(f"  u(1)         = {u.eval(1.0)!r}")
        print(f"  u(0)-F[u]    = {u.eval(0.0) - spec.boundary(u)!r}")
        for info in jump_info:
            print(f"  jump at {info['tau']:g}: {info['jump']!r} vs "
                  f"I(u) {info['I_of_left_value']!r} (err {info['error']:.3e})")
        print(f"  wrote {out}")
    return 0


def cmd_verify(loaded: LoadedProblem, args) -> int:
    spec = loaded.spec
    num = loaded.numerics
    u = read_solution_csv(args.solution, spec)
    op_res = float(np.max(np.abs(u.values - apply_T(spec, u, num.quad_tol).values)))
    bc_end = abs(u.eval(1.0))
    bc_start = abs(u.eval(0.0) - spec.boundary(u))
    jump_errs = {imp.tau: abs(u.jump(imp.tau) - imp.fn(u.eval(imp.tau, "left")))
                 for imp in spec.impulses}
    shot = shooting.solve_shooting(
        spec, shooting.default_guesses(spec, u), n_steps=num.shoot_steps)
    cross = shooting.crosscheck(u, shot.u) if shot.success else float("inf")
    worst = max(op_res, bc_end, bc_start, cross, *jump_errs.values())
    ok = worst <= VERIFY_TOL
    residuals = {
        "operator": op_res,
        "u_at_1": bc_end,
        "boundary": bc_start,
        "jumps": [{"tau": tau, "error": err} for tau, err in jump_errs.items()],
        "shooting_crosscheck": cross,
        "tolerance": VERIFY_TOL,
        "passed": ok,
    }
    if args.json:
        _emit_json({"constants": None, "conditions": None,
                    "solution_meta": {"nodes": int(u.grid.size)},
                    "residuals": residuals})
    else:
        print(f"operator residual    = {op_res!r}")
        print(f"u(1)                 = {bc_end!r}")
        print(f"u(0)-F[u]            = {bc_start!r}")
        for tau, err in jump_errs.items():
            print(f"jump error at {tau:g}  = {err!r}")
        state = f"{cross!r}" if shot.success else "shooting failed"
        print(f"shooting crosscheck  = {state}")
        print("VERIFIED" if ok else f"NOT VERIFIED (worst {worst:.3e} > {VERIFY_TOL:g})")
    return 0 if ok else 2


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impulse-cone",
        description="existence checks and certified positive solutions for "
                    "impulsive BVPs with Stieltjes boundary conditions")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("spec", help="problem file (TOML)")
        p.add_argument("--json", action="store_true",
                       help="machine-readable report on stdout")

    p = sub.add_parser("constants", help="print the condition constants")
    add_common(p)

    p = sub.add_parser("check", help="evaluate the existence hypotheses")
    add_common(p)
    p.add_argument("--rho1", type=float, default=None)
    p.add_argument("--rho2", type=float, default=None)
    p.add_argument("--f-sup", dest="f_sup", type=float, default=None,
                   help="asserted analytic sup bound of f(t,u)/rho (overrides sampling)")
    p.add_argument("--f-inf", dest="f_inf", type=float, default=None,
                   help="asserted analytic inf bound of f(t,u)/rho (overrides sampling)")

    p = sub.add_parser("solve", help="compute a positive solution")
    add_common(p)
    p.add_argument("--out", default=None, help="solution CSV path")
    p.add_argument("--rho1", type=float, default=None)
    p.add_argument("--rho2", type=float, default=None)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized routines (reserved; the solve "
                        "path is deterministic)")

    p = sub.add_parser("verify", help="verify a solution CSV against the problem")
    add_common(p)
    p.add_argument("solution", help="solution CSV produced by solve")

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; in this tool's exit-code
        # contract those are input errors (1), while 2 means an honest
        # negative outcome
        return 0 if exc.code in (0, None) else 1
    try:
        loaded = load_problem(args.spec)
        if args.command == "constants":
            return cmd_constants(loaded, args)
        if args.command == "check":
            return cmd_check(loaded, args)
        if args.command == "solve":
            return cmd_solve(loaded, args)
        return cmd_verify(loaded, args)
    except _USER_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
