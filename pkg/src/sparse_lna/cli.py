"""Command-line entry point: ``sparse-lna {gen,solve,sweep,check}``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
import argparse
import json
import sys

import numpy as np

from . import bench
from ._accel import backend_name
from .lagrangian import classify_stationarity
from .problem import Iterate, validate_derivatives
from .problems.cs import CsInstance, SensingSetup, generate
from .problems.portfolio import MvskInstance, ReturnPanel, lambdas_from_xi, synthetic_panel
from .serialize import load_instance, load_point, save_instance, save_point
from .solver import SolverConfig, solve

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_beta(problem):
    return 1.0 if isinstance(problem, MvskInstance) else 5.0 / problem.n


def _cmd_gen(args):
    if args.family == "mvsk":
        if args.s is None or args.n is None and args.panel is None:
            raise UsageError("mvsk needs --s and either --n or --panel")
        panel = ReturnPanel.from_csv(args.panel) if args.panel else synthetic_panel(args.n, args.t_obs, args.seed)
        inst = MvskInstance.from_panel(panel, lambdas_from_xi(args.xi), args.s)
        meta = {"xi": args.xi, "t_obs": panel.t_obs, "panel": args.panel or "synthetic"}
    else:
        if args.n is None or args.s is None or (args.p is None and args.r is None):
            raise UsageError("cs families need --n, --s and --p or --r")
        p = args.p if args.p is not None else bench._ceil(args.r * args.n)
        kind = "gaussian" if args.family == "cs_gaussian" else "dct"
        inst = generate(SensingSetup(args.n, p, args.s, kind, args.seed))
        meta = None
    save_instance(inst, args.output, seed=args.seed, meta=meta)
    print(f"wrote {args.family} instance n={inst.n} m={inst.m} s={inst.s} to {args.output}")


def _start_point(args, inst):
    if args.x0 == "zero":
        return Iterate.zeros(inst.n, inst.m)
    return load_point(args.x0, inst)


def _cmd_solve(args):
    inst = load_instance(args.instance)
    beta = args.beta if args.beta is not None else default_beta(inst)
    cfg = SolverConfig(beta=beta, epsilon=args.eps, max_iter=args.max_iter)
    report = solve(inst, _start_point(args, inst), cfg)
    print(f"backend         {backend_name()}")
    print(f"beta            {beta:.17g}")
    print(report.summary())
    if isinstance(inst, CsInstance) and inst.x_true is not None:
        print(f"abs_error       {np.linalg.norm(report.final.x - inst.x_true):.6e}")
    if isinstance(inst, MvskInstance):
        print(f"f_value         {inst.f(report.final.x):.17g}")
    if args.save_point:
        save_point(report.final, args.save_point)
    return 0


def _cmd_sweep(args):
    plan = bench.ExperimentPlan.from_json(args.plan)
    if args.workers is not None:
        plan.workers = args.workers
    csv_path, json_path = bench.output_paths(plan, args.output)
    records, _ = bench.run_plan(plan)
    timing = not args.no_timing
    bench.emit_csv(records, csv_path, timing=timing)
    bench.emit_json(bench.summarize(plan, records, timing=timing), json_path)
    print(f"wrote {len(records)} records to {csv_path} and summary to {json_path}")


def _cmd_check(args):
    inst = load_instance(args.instance)
    z = load_point(args.point, inst) if args.point else Iterate.zeros(inst.n, inst.m)
    beta = args.beta if args.beta is not None else default_beta(inst)
    deriv = validate_derivatives(inst, z.x, seed=args.seed)
    verdict = classify_stationarity(inst, z, beta, args.tol)
    print(deriv)
    print(verdict)
    if args.json:
        print(json.dumps({"derivatives": deriv.errors, "derivatives_pass": deriv.passed,
                          "is_strong_LS": verdict.is_strong_LS, "case": verdict.case,
                          "beta_hat": str(verdict.beta_hat)}))


def build_parser():
    parser = _Parser(prog="sparse-lna", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a JSON problem instance")
    g.add_argument("--family", choices=bench.FAMILIES, required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--r", type=float, help="row fraction, p = ceil(r n)")
    g.add_argument("--s", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--xi", type=float, default=5.0)
    g.add_argument("--t-obs", type=int, default=500)
    g.add_argument("--panel", help="CSV return panel (mvsk only)")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("solve", help="run the solver on an instance file")
    s.add_argument("instance")
    s.add_argument("--beta", type=float)
    s.add_argument("--eps", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--x0", default="zero", help="'zero' or a JSON point file")
    s.add_argument("--save-point", help="write the final (x, y) as JSON")
    s.set_defaults(func=_cmd_solve)

    w = sub.add_parser("sweep", help="execute an experiment plan")
    w.add_argument("--plan", required=True)
    w.add_argument("--output", help="CSV path (overrides plan.output_path)")
    w.add_argument("--workers", type=int)
    w.add_argument("--no-timing", action="store_true", help="blank wall_time for reproducible files")
    w.set_defaults(func=_cmd_sweep)

    c = sub.add_parser("check", help="derivative audit and stationarity verdict at a point")
    c.add_argument("instance")
    c.add_argument("--point", help="JSON point file; origin if omitted")
    c.add_argument("--beta", type=float)
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=_cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"sparse-lna {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ArithmeticError, KeyError) as exc:
        print(f"sparse-lna {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
