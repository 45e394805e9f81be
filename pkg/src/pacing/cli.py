"""Command-line interface: ``pacing <verb> ...``.

Exit codes: 0 success (or verified), 1 verification failed, 2 unreadable
input, 3 solver timeout.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .market import objectives, verify_equilibrium
from .market.io import (instance_hash, instance_to_dict, load_instance, load_outcome,
                        outcome_to_dict, save_instance)

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_TIMEOUT = 0, 1, 2, 3

log = logging.getLogger("pacing")


class InputError(Exception):
    pass


def _read_instance(path):
    try:
        return load_instance(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read instance {path}: {exc}") from exc


def _write_json(obj, path):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _instances(paths) -> list[tuple[str, object]]:
    return [(Path(p).stem, _read_instance(p)) for p in paths]


def _generated(args) -> list[tuple[str, object]]:
    from .instances import GenConfig, gen_stylized
    out = []
    for k in range(args.count):
        cfg = GenConfig(args.kind, args.n, args.m, args.sigma, args.seed + k)
        out.append((f"{args.kind}_{args.n}x{args.m}_s{args.seed + k}", gen_stylized(cfg)))
    return out


# verbs ---------------------------------------------------------------------

def cmd_generate(args) -> int:
    from .instances import (GadgetParams, GenConfig, fixtures, gen_3sat_revenue, gen_gadget,
                            gen_stylized, parse_dimacs)
    meta = {}
    if args.kind in ("complete", "sampled", "correlated"):
        inst = gen_stylized(GenConfig(args.kind, args.n, args.m, args.sigma, args.seed))
    elif args.kind == "gadget":
        inst = gen_gadget(GadgetParams(args.k1, args.alpha, args.delta))
    elif args.kind == "3sat":
        if not args.dimacs:
            raise InputError("--dimacs is required for kind 3sat")
        try:
            clauses, n_vars = parse_dimacs(Path(args.dimacs).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read formula: {exc}") from exc
        inst, threshold = gen_3sat_revenue(clauses, n_vars)
        meta["threshold"] = threshold
    else:
        table = fixtures()
        if args.name not in table:
            raise InputError(f"unknown fixture {args.name!r}; choose from {sorted(table)}")
        inst = table[args.name].instance
    if args.output in (None, "-"):
        _write_json(instance_to_dict(inst), None)
    else:
        save_instance(inst, args.output)
    if meta:
        log.info("threshold T = %s", meta["threshold"])
    return EXIT_OK


def cmd_solve(args) -> int:
    from .mip import SolverConfig, solve_instance
    inst = _read_instance(args.instance)
    cfg = SolverConfig(time_limit=args.time_limit, backend=args.backend, branching=args.branching)
    res = solve_instance(inst, args.objective, cfg)
    out = {"instance_hash": instance_hash(inst), "objective": args.objective,
           "status": res.status, "objective_value": res.objective_value,
           "bound": res.bound, "stats": res.stats.to_dict(), "flags": list(res.flags),
           "outcome": None, "verdict": None}
    code = EXIT_OK
    if res.outcome is not None:
        verdict = verify_equilibrium(inst, res.outcome)
        vals = objectives(inst, res.outcome)
        out.update(outcome=outcome_to_dict(res.outcome), verdict=verdict.to_dict(),
                   values={"revenue": vals.revenue, "social_welfare": vals.social_welfare,
                           "paced_welfare": vals.paced_welfare})
        if not verdict.accepted:
            code = EXIT_FAILED
    elif res.status != "timeout":
        code = EXIT_FAILED
    if res.status == "timeout":
        code = EXIT_TIMEOUT
    _write_json(out, args.output)
    return code


def cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    try:
        outcome = load_outcome(args.outcome)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot read outcome {args.outcome}: {exc}") from exc
    try:
        verdict = verify_equilibrium(inst, outcome)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write_json(verdict.to_dict(), args.output)
    return EXIT_OK if verdict.accepted else EXIT_FAILED


def cmd_dynamics(args) -> int:
    inst = _read_instance(args.instance)
    if args.mode == "br":
        from .dynamics import BrConfig, br_dynamics
        init = args.init
        if init not in ("random", "ones"):
            init = tuple(float(x) for x in init.split(","))
        trace = br_dynamics(inst, BrConfig(args.tie_break, args.max_iters, init, args.seed))
        text, mults = trace.to_jsonl(), np.array(trace.multipliers)
        summary = {"converged": trace.converged, "converged_at": trace.converged_at,
                   "final": trace.final.tolist(), "iterations": len(trace.records)}
    else:
        from .dynamics import AdaptiveConfig, adaptive_pacing
        from .instances import ScaleConfig, scale_instance
        scaled = scale_instance(inst, ScaleConfig(args.factor, args.sigma, args.seed))
        a0 = (np.ones(inst.n) if args.init in ("random", "ones")
              else np.array([float(x) for x in args.init.split(",")]))
        a0 = np.clip(a0, args.alpha_min, 1.0)
        trace = adaptive_pacing(scaled, AdaptiveConfig(tuple(a0), args.alpha_min, args.epsilon,
                                                       args.seed))
        text, mults = trace.to_jsonl(), trace.alphas
        summary = {"final": trace.final_alphas.tolist(), "revenue": float(trace.prices.sum()),
                   "auctions": int(trace.prices.size)}
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    if args.plot:
        from .experiments.plotting import plot_multipliers
        plot_multipliers(mults, args.plot, "iteration" if args.mode == "br" else "auction")
    log.info("%s", json.dumps(summary))
    return EXIT_OK


def _source(args):
    if args.instances:
        return _instances(args.instances)
    return _generated(args)


def _finish(report, args) -> int:
    written = report.write(args.out, figures=not args.no_plots)
    for p in written:
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_gap(args) -> int:
    from .experiments import run_gap_analysis
    return _finish(run_gap_analysis(_source(args), args.time_limit), args)


def cmd_misreport(args) -> int:
    from .experiments import MisreportGrid, run_misreport_study
    grid = MisreportGrid.fine() if args.fine else MisreportGrid()
    return _finish(run_misreport_study(_source(args), grid, args.focal, args.time_limit), args)


def cmd_scale(args) -> int:
    from .experiments import ScaleGrid, run_scalability
    grid = ScaleGrid(tuple(args.kinds), tuple(args.ns), tuple(args.ms), tuple(args.seeds),
                     args.sigma)
    return _finish(run_scalability(grid, args.time_limit), args)


def cmd_warmstart(args) -> int:
    from .dynamics import WarmStartGrid
    from .experiments import run_warm_start
    grid = WarmStartGrid(epsilons=tuple(args.epsilons), alpha_mins=tuple(args.alpha_mins),
                         time_limit=args.time_limit)
    return _finish(run_warm_start(_source(args), args.factor, tuple(args.sigmas), grid), args)


def cmd_report(args) -> int:
    from .experiments import ExperimentReport
    try:
        report = ExperimentReport.load(args.report)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot read report {args.report}: {exc}") from exc
    return _finish(report, args)


# parser --------------------------------------------------------------------

def _add_source(p, default_kind="complete"):
    p.add_argument("instances", nargs="*", help="instance JSON files (default: generate)")
    p.add_argument("--kind", default=default_kind, choices=["complete", "sampled", "correlated"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10, help="instances to generate")
    p.add_argument("--time-limit", type=float, default=300.0)
    p.add_argument("--out", default="report", help="output directory")
    p.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    from .mip import ALL_OBJECTIVES
    ap = argparse.ArgumentParser(prog="pacing", description="Pacing equilibria toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("generate", help="write an instance file")
    p.add_argument("--kind", default="complete",
                   choices=["complete", "sampled", "correlated", "gadget", "3sat", "fixture"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="revenue_gap", help="fixture name")
    p.add_argument("--k1", type=float, default=4.0)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--dimacs", help="CNF file for kind 3sat")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("solve", help="solve the MIP for one objective")
    p.add_argument("instance")
    p.add_argument("--objective", default="feasibility", choices=[o.value for o in ALL_OBJECTIVES])
    p.add_argument("--time-limit", type=float, default=300.0)
    p.add_argument("--backend", default="embedded", choices=["embedded", "external"])
    p.add_argument("--branching", default="strong", choices=["strong", "most_fractional"])
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="check an outcome against an instance")
    p.add_argument("instance")
    p.add_argument("outcome")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("dynamics", help="best-response or adaptive pacing dynamics")
    p.add_argument("instance")
    p.add_argument("--mode", default="br", choices=["br", "adaptive"])
    p.add_argument("--tie-break", default="high", choices=["high", "low"])
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--init", default="random", help="random, ones, or comma-separated values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--factor", type=int, default=100)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--alpha-min", type=float, default=0.05)
    p.add_argument("--plot", help="PNG path for a multiplier plot")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_dynamics)

    p = sub.add_parser("gap", help="equilibrium gap analysis")
    _add_source(p)
    p.set_defaults(fn=cmd_gap)

    p = sub.add_parser("misreport", help="misreport incentive study")
    _add_source(p)
    p.add_argument("--focal", type=int, default=0)
    p.add_argument("--fine", action="store_true", help="budget scalars in steps of 0.05")
    p.set_defaults(fn=cmd_misreport)

    p = sub.add_parser("scale", help="MIP scalability sweep")
    p.add_argument("--kinds", nargs="+", default=["complete", "sampled", "correlated"])
    p.add_argument("--ns", nargs="+", type=int, default=[2, 3, 4])
    p.add_argument("--ms", nargs="+", type=int, default=[2, 4, 6])
    p.add_argument("--seeds", nargs="+", type=int, default=[0, 1, 2])
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--time-limit", type=float, default=300.0)
    p.add_argument("--out", default="report")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(fn=cmd_scale)

    p = sub.add_parser("warmstart", help="MIP-seeded versus constant-start adaptive pacing")
    _add_source(p)
    p.add_argument("--factor", type=int, default=500)
    p.add_argument("--sigmas", nargs="+", type=float, default=[0.0, 0.1])
    p.add_argument("--epsilons", nargs="+", type=float, default=[0.01, 1.0, 2.0])
    p.add_argument("--alpha-mins", nargs="+", type=float, default=[0.05, 0.1])
    p.set_defaults(fn=cmd_warmstart)

    p = sub.add_parser("report", help="re-render tables and figures from report.json")
    p.add_argument("report", help="report directory or report.json")
    p.add_argument("--out", default="report")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
