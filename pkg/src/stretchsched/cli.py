"""Command-line front end: ``stretch run|gen|verify|export``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import io
from .checks import CHECKS, BatchConfig, Options, verify
from .forest import POS, build_forest, active_intervals, pos_schedule
from .gen import MODES, GenConfig, random_instance
from .model import Instance, ScheduleError, decimal, delta_ratio, fmt, stretch_report
from .oracle import OPT, OracleLimitError, optimal_nonpreemptive
from .parallel import DSPTM, OMMS, SPTM, dsptm_schedule, omms_schedule, partition_blocks, sptm_schedule, virtual_instance
from .single import SPT, SRPT, spt_schedule, srpt_schedule

POLICIES = (SPT, SRPT, POS, OMMS, SPTM, DSPTM, OPT)
SINGLE_ONLY = (SRPT, POS)


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _fraction_list(text: str) -> tuple[Fraction, ...]:
    return tuple(_fraction(part) for part in text.split(","))


def _mode_list(text: str) -> tuple[str, ...]:
    modes = tuple(text.split(","))
    for mode in modes:
        if mode not in MODES:
            raise argparse.ArgumentTypeError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    return modes


def build_policy(instance: Instance, policy: str, *, budget: int | None = None, unit: Fraction | None = None):
    """Schedule ``instance`` with ``policy``; the D-SPTM delay unit defaults to p_min/m."""
    if policy in SINGLE_ONLY and instance.machines != 1:
        raise ScheduleError(f"{policy} is a single-machine policy; the instance has m={instance.machines}")
    if policy == SPT:
        return spt_schedule(instance)
    if policy == SRPT:
        return srpt_schedule(instance)
    if policy == POS:
        srpt = srpt_schedule(instance)
        return pos_schedule(build_forest(active_intervals(srpt)), srpt)
    if policy == OMMS:
        return omms_schedule(spt_schedule(instance))
    if policy == SPTM:
        return sptm_schedule(virtual_instance(instance))
    if policy == DSPTM:
        if unit is None:
            unit = min(job.processing for job in instance.jobs) / instance.machines
        return dsptm_schedule(sptm_schedule(virtual_instance(instance)), delta_ratio(instance), unit)
    if policy == OPT:
        return optimal_nonpreemptive(instance, budget).schedule
    raise ValueError(f"unknown policy {policy!r}")


def cmd_run(args: argparse.Namespace) -> int:
    instance = io.read_instance(args.instance)
    schedule = build_policy(instance, args.policy, budget=args.oracle_budget, unit=args.dsptm_unit)
    report = stretch_report(schedule)
    if args.out:
        io.write_json(args.out, io.schedule_to_dict(schedule))
    if args.gantt:
        io.write_text(args.gantt, io.gantt_csv(schedule))
    if args.dump_forest:
        srpt = srpt_schedule(instance.with_machines(1))
        io.write_json(args.dump_forest, build_forest(active_intervals(srpt)).to_dict())
    if args.dump_blocks:
        virtual = virtual_instance(instance)
        dump = io.blocks_dump(
            partition_blocks(virtual), omms_schedule(spt_schedule(instance)), sptm_schedule(virtual)
        )
        io.write_json(args.dump_blocks, dump)
    print(f"{args.policy} total stretch: {fmt(report.total)} ({decimal(report.total)})")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    config = GenConfig(
        seed=args.seed,
        n=args.n,
        m=args.m,
        delta_max=args.delta_max,
        mode=args.mode,
        tie_bias=args.tie_bias,
        grid=args.grid,
    )
    instance = random_instance(config)
    if args.out:
        io.write_instance(instance, args.out)
    else:
        print(json.dumps(io.instance_to_dict(instance), indent=2))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    options = Options(
        budget=args.oracle_budget,
        oracle_max_n=args.oracle_max_n,
        delta_scope=args.delta_scope,
        dsptm_unit=args.dsptm_unit,
    )
    config = BatchConfig(
        seed=args.seed,
        trials=args.trials,
        n_min=args.n_min,
        n_max=args.n_max,
        m_values=args.m,
        delta_max_values=args.delta_max,
        modes=args.modes,
        tie_bias=args.tie_bias,
        grid=args.grid,
        include_families=args.include_families,
        checks=tuple(args.checks) if args.checks else CHECKS,
        options=options,
    )
    report = verify(config, workers=args.jobs)
    data = io.report_to_dict(report)
    if args.out:
        io.write_json(args.out, data)
    if args.csv:
        io.write_text(args.csv, io.report_csv(data))
    for name, entry in data["summary"].items():
        counts = entry["counts"]
        worst = entry["worst_ratio"] or "-"
        print(
            f"{name:24s} pass={counts['pass']:<6d} fail={counts['fail']:<6d} "
            f"skipped={counts['skipped-budget']:<6d} worst_ratio={worst}"
        )
    print("all checks passed" if report.ok else "some checks FAILED")
    return 0 if report.ok else 1


def cmd_export(args: argparse.Namespace) -> int:
    with open(args.report, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("format") != io.REPORT_FORMAT:
        raise ValueError(f"{args.report} is not a check report")
    text = io.report_csv(data) if args.format == "csv" else json.dumps(data, indent=2) + "\n"
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stretch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="schedule one instance file with a policy")
    run.add_argument("instance")
    run.add_argument("--policy", choices=POLICIES, required=True)
    run.add_argument("--out", help="schedule JSON with its stretch report")
    run.add_argument("--gantt", help="Gantt CSV (job, machine, start, end)")
    run.add_argument("--dump-forest", help="SRPT forest JSON")
    run.add_argument("--dump-blocks", help="block partition JSON")
    run.add_argument("--oracle-budget", type=int, default=None)
    run.add_argument("--dsptm-unit", type=_fraction, default=None, help="D-SPTM delay unit (default p_min/m)")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen", help="generate a seeded random instance")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=1)
    gen.add_argument("--delta-max", type=_fraction, default=Fraction(3))
    gen.add_argument("--mode", choices=MODES, default="dense")
    gen.add_argument("--tie-bias", type=_fraction, default=Fraction(0))
    gen.add_argument("--grid", type=int, default=6)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="run every check over a seeded batch")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--n-min", type=int, default=1)
    ver.add_argument("--n-max", type=int, default=8)
    ver.add_argument("--m", type=_int_list, default=(1, 2, 3), help="comma-separated machine counts")
    ver.add_argument("--delta-max", type=_fraction_list, default=(Fraction(2), Fraction(3), Fraction(5)))
    ver.add_argument("--modes", type=_mode_list, default=MODES)
    ver.add_argument("--tie-bias", type=_fraction, default=Fraction(1, 4))
    ver.add_argument("--grid", type=int, default=6)
    ver.add_argument("--include-families", action="store_true")
    ver.add_argument("--checks", nargs="+", choices=CHECKS)
    ver.add_argument("--oracle-budget", type=int, default=None)
    ver.add_argument("--oracle-max-n", type=int, default=8)
    ver.add_argument("--delta-scope", choices=("global", "block"), default="global")
    ver.add_argument("--dsptm-unit", choices=("normalized", "literal"), default="normalized")
    ver.add_argument("--jobs", type=int, default=1, help="worker processes")
    ver.add_argument("--out", help="report JSON")
    ver.add_argument("--csv", help="report CSV")
    ver.set_defaults(func=cmd_verify)

    exp = sub.add_parser("export", help="convert a report JSON")
    exp.add_argument("report")
    exp.add_argument("--format", choices=("csv", "json"), default="csv")
    exp.add_argument("--out")
    exp.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
