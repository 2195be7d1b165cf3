"""Command-line entry point: run, bench, list-functions and levelset."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import benchmarks, harness


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pesmc", description="Sampling-based global maximization on benchmark functions.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for per-iteration debug logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one optimization run")
    p.add_argument("--fn", required=True, help="function name, e.g. TF9")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--algo", choices=sorted(harness.ALGORITHMS), default="pe-smc")
    p.add_argument("--samples", type=int, default=None, help="samples per iteration (default depends on dim)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda1", type=float, default=None, help="initial annealing exponent (pe-smc)")
    p.add_argument("--beta", type=float, default=None, help="ESS retention factor (pe-smc)")
    p.add_argument("--ness-threshold", type=float, default=None, help="stop adding components above this NESS (pe-smc)")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--trace", default=None, help="write the per-iteration trace CSV here")

    p = sub.add_parser("bench", help="run a JSON benchmark plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True, help="directory for runs.csv and summary.csv")
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("list-functions", help="supported functions, dims, boxes and goal values")

    p = sub.add_parser("levelset", help="quadrature mass of f^lambda on the eps level set (d <= 2)")
    p.add_argument("--fn", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--grid", type=int, default=801)
    return parser


def _cmd_run(args) -> int:
    overrides = {"n_samples": args.samples, "max_iters": args.max_iters}
    pe_only = {"lambda1": args.lambda1, "beta": args.beta, "ness_threshold": args.ness_threshold}
    if args.algo == "pe-smc":
        overrides.update(pe_only)
    elif any(v is not None for v in pe_only.values()):
        raise ValueError("--lambda1, --beta and --ness-threshold apply to pe-smc only")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    spec = benchmarks.make_function(args.fn, args.dim)
    result = harness.run_algorithm(spec, args.algo, args.seed, **overrides)
    if args.trace:
        harness.write_trace(args.trace, result.trace)
    print(json.dumps(harness.result_record(result)))
    return 0


def _cmd_bench(args) -> int:
    plan = harness.BenchPlan.load(args.plan)
    rows, summary, code = harness.run_bench(plan, args.out, workers=args.workers)
    for s in summary:
        print(f"{s.function} {s.dim}D {s.algorithm}: n={s.n_runs} mean={s.mean_best:.10g} std={s.std_best:.3g}")
    failed = [r for r in rows if r.status != "ok"]
    for r in failed:
        print(f"{r.function} {r.dim}D {r.algo} seed={r.seed}: {r.status}", file=sys.stderr)
    return code


def _cmd_levelset(args) -> int:
    spec = benchmarks.make_function(args.fn, args.dim)
    print(format(harness.level_set_mass(spec, args.lam, args.eps, args.grid), ".17g"))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "list-functions":
            print("\n".join(harness.list_functions()))
            return 0
        return _cmd_levelset(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"pesmc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
