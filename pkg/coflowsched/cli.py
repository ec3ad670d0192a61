"""
coflowsched command line
========================
  python -m coflowsched gen --seed 7 --coflows 25 --cores 5 -o inst.txt
  python -m coflowsched run scenario.cfg --seed 7 -o rows.csv --summary summary.csv
  python -m coflowsched run --preset cores --seed 7 -o rows.csv
  python -m coflowsched trace FB2010-1Hr-150-0.txt --threshold 200 400
  python -m coflowsched oracle inst.txt --level coflow
  python -m coflowsched realize inst.txt --scheduler flpt -o schedule.txt

Logs go to stderr; data goes to the named file or stdout.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import asdict
from typing import Optional, Sequence

from .config import configure_logging, get_settings
from .harness import PRESETS, emit_cdf, emit_csv, emit_summary, load_scenario, preset, run_scenario
from .lowerbound import lower_bounds
from .model import format_load
from .oracle import OracleLimits, brute_force_coflow, brute_force_flow
from .realizer import dump_schedule, realize
from .schedulers import SchedulerKind, predicted_makespan, schedule
from .workload import (
    Mixture,
    derive_rng,
    filter_by_flow_count,
    gen_instance,
    gen_speeds,
    read_instance,
    read_trace,
    trace_stats,
    write_instance,
)

logger = logging.getLogger("coflow-cli")


# ─── Commands ───────────────────────────────────────────────


def cmd_gen(args: argparse.Namespace) -> int:
    speeds = ()
    if args.heterogeneity:
        speeds = gen_speeds(args.cores, args.heterogeneity, derive_rng(args.seed, 1))
    mixture = Mixture.named(args.mixture, args.ports)
    instance = gen_instance(args.coflows, args.ports, args.cores, mixture, derive_rng(args.seed, 0), speeds)
    write_instance(instance, args.output)
    logger.info("Instance written | path=%s coflows=%d flows=%d", args.output, len(instance.coflows), instance.flow_count)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    overrides = dict(seed=args.seed, trials=args.trials, trace=args.trace)
    if args.preset:
        scenario = preset(args.preset, **overrides)
    elif args.config:
        scenario = load_scenario(args.config, **overrides)
    else:
        raise ValueError("run needs a scenario file or --preset")

    report = run_scenario(scenario, workers=args.workers)
    emit_csv(report, args.output)
    if args.cdf:
        emit_cdf(report, args.cdf)
    if args.summary:
        emit_summary(report, args.summary)
    for error in report.errors:
        logger.warning("Skipped | point=%s scheduler=%s trial=%d reason=%s",
                       error.point, error.scheduler, error.trial, error.reason)
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    trace = read_trace(args.path)
    writer = csv.DictWriter(sys.stdout, fieldnames=[
        "threshold", "coflows", "min_flows", "max_flows", "max_raw_flows", "min_size", "max_size"])
    writer.writeheader()
    for threshold in args.threshold:
        kept = filter_by_flow_count(trace.coflows, threshold)
        # mapper x reducer pairs as listed, before same-port pairs merge
        raw = max((trace.widths[c.id] for c in kept), default=0)
        writer.writerow({"threshold": threshold, **asdict(trace_stats(kept)), "max_raw_flows": raw})
    logger.info("Trace summarized | path=%s ports=%d coflows=%d max_width=%d",
                args.path, trace.ports, len(trace.coflows), max(trace.widths.values(), default=0))
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = read_instance(args.path)
    limits = OracleLimits(args.max_states or get_settings().oracle_max_states)
    solver = brute_force_coflow if args.level == "coflow" else brute_force_flow
    result = solver(instance, limits)
    bounds = lower_bounds(instance)
    print(f"optimum={format_load(result.optimum)}")
    print(f"explored={result.explored}")
    print(f"port_lb={format_load(bounds.port_lb)}")
    print(f"combined_lb={format_load(bounds.combined)}")
    for h, flows in enumerate(result.witness.core_flows):
        print(f"core{h + 1}=" + ",".join(str(f) for f in flows))
    return 0


def cmd_realize(args: argparse.Namespace) -> int:
    instance = read_instance(args.path)
    assignment = schedule(args.scheduler, instance)
    realized = realize(assignment, instance)
    predicted = predicted_makespan(assignment, instance, realized)
    if realized.makespan != predicted.overall:
        raise RuntimeError(f"Realized makespan {realized.makespan} differs from predicted {predicted.overall}")

    if args.output:
        with open(args.output, "w", encoding="utf-8") as out:
            lines = dump_schedule(realized, out)
    else:
        lines = dump_schedule(realized, sys.stdout)
    logger.info("Schedule realized | scheduler=%s makespan=%s slices=%d",
                args.scheduler, format_load(realized.makespan), lines)
    return 0


# ─── Parser ─────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coflowsched", description="Coflow makespan scheduling on parallel switch cores")
    ap.add_argument("--log-level", help="Override COFLOW_LOG_LEVEL")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a synthetic instance file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--coflows", type=int, default=25, help="K (default: 25)")
    gen.add_argument("--ports", type=int, default=10, help="N (default: 10)")
    gen.add_argument("--cores", type=int, default=5, help="m (default: 5)")
    gen.add_argument("--mixture", default="default", choices=["default", "dense", "sparse", "combined"])
    gen.add_argument("--heterogeneity", type=int, help="h; omit for an identical network")
    gen.add_argument("-o", "--output", required=True, help="Instance file to write")
    gen.set_defaults(handler=cmd_gen)

    run = sub.add_parser("run", help="Run a scenario and write CSV rows")
    run.add_argument("config", nargs="?", help="key = value scenario file")
    run.add_argument("--preset", choices=sorted(PRESETS))
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--trials", type=int)
    run.add_argument("--trace", help="Trace file for trace scenarios")
    run.add_argument("--workers", type=int, help="Process pool size (default: COFLOW_WORKERS)")
    run.add_argument("-o", "--output", required=True, help="Rows CSV")
    run.add_argument("--cdf", help="Core completion samples CSV")
    run.add_argument("--summary", help="Quartile summary CSV")
    run.set_defaults(handler=cmd_run)

    trace = sub.add_parser("trace", help="Parse a coflow trace and print stats per threshold")
    trace.add_argument("path")
    trace.add_argument("--threshold", type=int, nargs="+", default=[0])
    trace.set_defaults(handler=cmd_trace)

    oracle = sub.add_parser("oracle", help="Brute-force the optimum of a small instance")
    oracle.add_argument("path")
    oracle.add_argument("--level", choices=["flow", "coflow"], default="flow")
    oracle.add_argument("--max-states", type=int)
    oracle.set_defaults(handler=cmd_oracle)

    rl = sub.add_parser("realize", help="Schedule an instance and dump its time slices")
    rl.add_argument("path")
    rl.add_argument("--scheduler", default=SchedulerKind.FLPT.value, choices=[k.value for k in SchedulerKind])
    rl.add_argument("-o", "--output", help="Dump file (default: stdout)")
    rl.set_defaults(handler=cmd_realize)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ValueError as exc:
        logger.error("%s failed | reason=%s", args.command, exc)
        return 1
    except (RuntimeError, OSError):
        logger.exception("%s failed", args.command)
        return 1


if __name__ == "__main__":
    sys.exit(main())
