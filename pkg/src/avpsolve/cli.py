"""Command-line entry point.

Exit codes: 0 success, 1 bad input (file, expression, flags), 2 numeric
failure, 3 grid misalignment, 4 table reproduction mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

import numpy as np

from . import table1
from .analysis import convergence_condition, estimate_lipschitz, observed_order, stability_condition
from .avp import solve_avp
from .core import Interval
from .errors import (
    AvpError,
    DegenerateOrderError,
    ExpressionError,
    GridMisalignmentError,
    InvalidArgumentError,
    NumericOverflowError,
    ProblemFileError,
)
from .expr import compile_function, compile_system
from .problemfile import read_problem_file
from .steppers import MethodKind, MethodSpec

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_GRID, EXIT_MISMATCH = 0, 1, 2, 3, 4

METHOD_NAMES = [k.value for k in MethodKind if k is not MethodKind.GENERAL_RK]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _method(args) -> MethodSpec:
    return MethodSpec.from_name(args.method, corrector_tol=args.tol, corrector_max_iters=args.max_iters)


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _exact_fns(texts: Sequence[str] | None, dimension: int):
    if not texts:
        return None
    if len(texts) != dimension:
        raise InvalidArgumentError(f"--exact given {len(texts)} times, system dimension is {dimension}")
    fns = [compile_function(t, 0) for t in texts]
    return lambda x: np.array([fn(x, ()) for fn in fns])


# ---- solve --------------------------------------------------------------


def cmd_solve(args, out: TextIO) -> int:
    problem = read_problem_file(args.problem_file)
    method = _method(args)
    n = problem.system.dimension
    exact = _exact_fns(args.exact, n)
    sol = solve_avp(problem, method, args.h)
    traj = sol.trajectory

    legs = []
    for leg in sol.legs:
        legs.append({
            "direction": leg.direction.value,
            "from": float(leg.xs[0]),
            "to": float(leg.xs[-1]),
            "h": leg.step,
            "steps": len(leg) - 1,
        })
    unconverged = [float(traj.xs[i]) for i in traj.unconverged]
    if unconverged:
        print(f"warning [steppers]: corrector hit its iteration cap at x = {unconverged}", file=sys.stderr)

    rows = []
    for x, y in zip(traj.xs, traj.ys):
        row = {"x": float(x), "y": [float(v) for v in y]}
        if exact is not None:
            ex = exact(float(x))
            row["exact"] = [float(v) for v in ex]
            row["abs_error"] = [float(v) for v in np.abs(y - ex)]
        rows.append(row)

    if args.format == "json":
        meta = {
            "method": method.name,
            "class": sol.problem_class.value,
            "h_requested": args.h,
            "legs": legs,
            "condition_index": sol.leg_boundary_index,
            "unconverged_x": unconverged,
        }
        json.dump({"meta": meta, "rows": rows}, out, indent=2)
        out.write("\n")
        return EXIT_OK

    out.write(f"# method={method.name} class={sol.problem_class.value} h_requested={args.h:g}\n")
    for leg in legs:
        out.write(f"# leg {leg['direction']} {leg['from']:g} -> {leg['to']:g}: h={leg['h']:.12g} steps={leg['steps']}\n")
    header = ["x"] + [f"y{i + 1}" for i in range(n)]
    if exact is not None:
        header += [f"exact{i + 1}" for i in range(n)] + [f"err{i + 1}" for i in range(n)]
    out.write(",".join(header) + "\n")
    for row in rows:
        cells = [row["x"]] + row["y"] + row.get("exact", []) + row.get("abs_error", [])
        out.write(",".join(_fmt(v) for v in cells) + "\n")
    return EXIT_OK


# ---- analyze --------------------------------------------------------------


def _report_out(report: dict, human: str, out: TextIO) -> None:
    out.write(human + "\n")
    out.write(json.dumps(report) + "\n")


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--what {args.what} needs {', '.join(missing)}")


def _order_setup(args):
    if args.problem is None:
        system = table1.system()
        leg = (1.0, table1.SQRT3, 0.0)
        if args.direction == "forward":
            leg = (0.0, 1.0, 1.0)
        return system, leg, lambda x: [table1.exact(x)]
    problem = read_problem_file(args.problem)
    exact = _exact_fns(args.exact, problem.system.dimension)
    if exact is None:
        raise UsageError("--what order with --problem needs --exact")
    cond = problem.condition
    a, c = problem.interval.lo, problem.interval.hi
    far = a if cond.x_b - a >= c - cond.x_b else c
    return problem.system, (cond.x_b, cond.y_b, far), exact


def cmd_analyze(args, out: TextIO) -> int:
    what = args.what
    if what == "stability":
        _need(args, "h", "lam")
        rep = stability_condition(MethodKind(args.method), args.h, args.lam)
        human = f"stability [{args.method}]: {rep.inequality_text} -> {rep.verdict} (lhs={rep.lhs:.6g}, rhs={rep.rhs:g})"
        _report_out(rep.as_dict(), human, out)
    elif what == "convergence":
        _need(args, "h", "L")
        rep = convergence_condition(MethodKind(args.method), args.h, args.L)
        human = (
            f"convergence [{args.method}]: {rep.inequality_text} -> {rep.verdict} "
            f"(lhs={rep.lhs:.6g} {rep.relation} rhs={rep.rhs:.6g})"
        )
        _report_out(rep.as_dict(), human, out)
    elif what == "lipschitz":
        _need(args, "x_range", "y_box")
        if args.problem is not None:
            system = read_problem_file(args.problem).system
        elif args.rhs:
            system = compile_system(args.rhs, len(args.rhs))
        else:
            raise UsageError("--what lipschitz needs --rhs or --problem")
        est = estimate_lipschitz(system, Interval(*args.x_range), [tuple(b) for b in args.y_box], args.samples)
        human = f"lipschitz: L = {est.L:.9g} from {est.sample_count} samples"
        _report_out({"what": "lipschitz", "L": est.L, "sample_count": est.sample_count}, human, out)
    elif what == "order":
        _need(args, "h")
        system, leg, exact = _order_setup(args)
        p = observed_order(system, exact, leg, _method(args), args.h)
        human = f"order [{args.method}]: observed order {p:.4f} (h={args.h:g} vs h/2)"
        _report_out({"what": "order", "method": args.method, "h": args.h, "order": p}, human, out)
    return EXIT_OK


# ---- table1 -----------------------------------------------------------------


def cmd_table1(args, out: TextIO) -> int:
    fwd, bwd = table1.reproduce()
    out.write(f"{'Initial Value Problem':<34}| Final Value Problem\n")
    head = f"{'x_n':>4}  {'y_n':>9}  {'|y_n-y(x_n)|':>12}  "
    out.write(head + "| " + head.rstrip() + "\n")
    for f, b in zip(fwd, bwd):
        left = f"{f.x:>4.1f}  {f.y:>9.6f}  {f.error:>12.6f}  "
        right = f"{b.x:>4.1f}  {b.y:>9.6f}  {b.error:>12.6f}"
        out.write(left + "| " + right + "\n")
    bad = [("forward", r) for r in fwd if not r.ok] + [("backward", r) for r in bwd if not r.ok]
    if bad:
        for block, r in bad:
            print(
                f"error [table1]: {block} row x={r.x:.1f}: y={r.y:.6f} (published {r.published_y:.6f}), "
                f"error {r.error:.2e}",
                file=sys.stderr,
            )
        return EXIT_MISMATCH
    return EXIT_OK


# ---- wiring ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="avpsolve", description="Backward/forward one-step solvers for arbitrary value problems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def method_flags(sp, required: bool):
        sp.add_argument("--method", choices=METHOD_NAMES, required=required, default=None if required else "rk4")
        sp.add_argument("--tol", type=float, default=1e-12, help="corrector tolerance (PC methods)")
        sp.add_argument("--max-iters", type=int, default=50, help="corrector iteration cap (PC methods)")

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("problem_file")
    method_flags(s, required=False)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--exact", action="append", help="exact solution expression in x (repeat per component)")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="convergence, stability, Lipschitz or order analysis")
    a.add_argument("--what", choices=["stability", "convergence", "lipschitz", "order"], required=True)
    method_flags(a, required=False)
    a.add_argument("--h", type=float)
    a.add_argument("--lambda", dest="lam", type=float)
    a.add_argument("--L", dest="L", type=float)
    a.add_argument("--rhs", action="append", help="rhs expression (repeat per component)")
    a.add_argument("--problem", help="problem file (order/lipschitz)")
    a.add_argument("--exact", action="append")
    a.add_argument("--direction", choices=["backward", "forward"], default="backward",
                   help="leg of the built-in fixture used by --what order")
    a.add_argument("--x-range", nargs=2, type=float, metavar=("A", "C"))
    a.add_argument("--y-box", nargs=2, type=float, action="append", metavar=("LO", "HI"))
    a.add_argument("--samples", type=int, default=11)
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("table1", help="reproduce the y' = y - 2x/y forward/backward RK4 table")
    t.set_defaults(func=cmd_table1)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"error [cli]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ProblemFileError as exc:
        print(f"error [problem-file]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExpressionError as exc:
        print(f"error [expr]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GridMisalignmentError as exc:
        print(f"error [avp]: {exc}", file=sys.stderr)
        return EXIT_GRID
    except (NumericOverflowError, DegenerateOrderError) as exc:
        print(f"error [numeric]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidArgumentError as exc:
        print(f"error [arguments]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AvpError as exc:
        print(f"error [avpsolve]: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
