"""Per-instance evaluation of every competitive-ratio statement, and seeded batches of them.

Each check yields a verdict (pass / fail / skipped-budget) computed on
exact rationals. Single-machine statements are evaluated on the job set
run on one machine; parallel statements use the instance's own m.
"""

from __future__ import annotations

import datetime
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .forest import LaminarityError, active_intervals, build_forest, pos_schedule
from .gen import MODES, GenConfig, Stream, adversarial_family, random_instance
from .model import (
    Instance,
    compactness_gaps,
    delta_ratio,
    fmt,
    is_compact,
    stretch_report,
    total_stretch,
    validate_schedule,
)
from .oracle import (
    OracleLimitError,
    competitive_bound,
    default_budget,
    optimal_nonpreemptive,
    parallel_lower_bound,
    single_ratio,
    spt_to_pos_delta_audit,
)
from .parallel import (
    dsptm_schedule,
    dsptm_shift,
    omms_schedule,
    partition_blocks,
    sptm_schedule,
    virtual_instance,
)
from .single import spt_schedule, srpt_schedule

PASS, FAIL, SKIPPED = "pass", "fail", "skipped-budget"

CHECKS = (
    "pos_compactness",
    "pos_vs_srpt",
    "swap_delta_sum",
    "spt_vs_srpt",
    "srpt_vs_opt",
    "spt_vs_opt_single",
    "virtual_speedup",
    "block_sets",
    "block_chain",
    "sptm_lower_bound",
    "spt_vs_opt_parallel",
)
ORACLE_CHECKS = ("srpt_vs_opt", "spt_vs_opt_single", "sptm_lower_bound", "spt_vs_opt_parallel")
SINGLE_CHECKS = CHECKS[:6]
PARALLEL_CHECKS = CHECKS[6:]


@dataclass(frozen=True)
class CheckResult:
    name: str
    verdict: str
    lhs: Fraction | None = None
    rhs: Fraction | None = None
    ratio: Fraction | None = None
    limit: Fraction | None = None
    details: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def _ratio(a: Fraction, b: Fraction) -> Fraction | None:
    return a / b if b else None


@dataclass(frozen=True)
class Options:
    """Knobs shared by every check.

    ``delta_scope``: D-SPTM delay from the instance-wide ratio or each block's own.
    ``dsptm_unit``: ``normalized`` measures the delay in units of the smallest
    virtual processing time (so p_min/m); ``literal`` uses absolute time units.
    """

    budget: int | None = None
    oracle_max_n: int = 8
    delta_scope: str = "global"
    dsptm_unit: str = "normalized"

    def __post_init__(self) -> None:
        if self.delta_scope not in ("global", "block"):
            raise ValueError(f"delta_scope must be global or block, got {self.delta_scope!r}")
        if self.dsptm_unit not in ("normalized", "literal"):
            raise ValueError(f"dsptm_unit must be normalized or literal, got {self.dsptm_unit!r}")


class _Context:
    """Lazily built schedules of one instance, shared between checks."""

    def __init__(self, instance: Instance, options: Options) -> None:
        self.instance = instance
        self.single = instance.with_machines(1)
        self.options = options
        self.delta = delta_ratio(instance)
        self._cache: dict[str, object] = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def srpt(self):
        return self._get("srpt", lambda: srpt_schedule(self.single))

    @property
    def spt1(self):
        return self._get("spt1", lambda: spt_schedule(self.single))

    @property
    def forest(self):
        return self._get("forest", lambda: build_forest(active_intervals(self.srpt)))

    @property
    def pos(self):
        return self._get("pos", lambda: pos_schedule(self.forest, self.srpt))

    @property
    def spt(self):
        return self._get("spt", lambda: spt_schedule(self.instance))

    @property
    def virtual(self):
        return self._get("virtual", lambda: virtual_instance(self.instance))

    @property
    def omms(self):
        return self._get("omms", lambda: omms_schedule(self.spt))

    @property
    def sptm(self):
        return self._get("sptm", lambda: sptm_schedule(self.virtual))

    @property
    def blocks(self):
        return self._get("blocks", lambda: partition_blocks(self.virtual))

    def opt(self, machines: int):
        key = f"opt{machines}"
        if key not in self._cache:
            inst = self.instance.with_machines(machines)
            if inst.n > self.options.oracle_max_n:
                self._cache[key] = None
            else:
                try:
                    self._cache[key] = optimal_nonpreemptive(inst, self.options.budget)
                except OracleLimitError:
                    self._cache[key] = None
        return self._cache[key]

    def total(self, key: str) -> Fraction:
        return self._get("total_" + key, lambda: total_stretch(getattr(self, key)))


def _check_pos_compactness(ctx: _Context) -> CheckResult:
    try:
        forest = ctx.forest
    except LaminarityError as exc:
        return CheckResult("pos_compactness", FAIL, details={"laminarity": str(exc)})
    pos = ctx.pos
    valid = validate_schedule(pos).ok
    srpt_compact = is_compact(ctx.srpt)
    pos_compact = is_compact(pos)
    starts = pos.starts()
    completions = pos.completions()
    outside = []
    for root in forest.roots:
        iv = forest.intervals[root]
        for j in forest.tree(root):
            if starts[j] < iv.start or completions[j] > iv.end:
                outside.append(j)
    ok = valid and srpt_compact == pos_compact and not outside
    return CheckResult(
        "pos_compactness",
        _verdict(ok),
        details={
            "pos_valid": valid,
            "srpt_compact": srpt_compact,
            "pos_compact": pos_compact,
            "jobs_outside_root_interval": outside,
            "trees": len(forest.roots),
            "depth": forest.depth(),
        },
    )


def _check_pos_vs_srpt(ctx: _Context) -> CheckResult:
    forest, pos, srpt = ctx.forest, ctx.pos, ctx.srpt
    jobs = ctx.single.by_id
    s_pos = stretch_report(pos, validate=False).stretches
    s_srpt = stretch_report(srpt, validate=False).stretches
    shift_facts = []
    for root in forest.roots:
        members = forest.tree(root)
        p_root = jobs[root].processing
        expected = s_srpt[root] - sum((jobs[k].processing / p_root for k in members if k != root), Fraction(0))
        if s_pos[root] != expected:
            shift_facts.append(f"root {root}: {fmt(s_pos[root])} != {fmt(expected)}")
        for k in members:
            if k != root and s_pos[k] > s_srpt[k] + p_root / jobs[k].processing:
                shift_facts.append(f"job {k}: delayed by more than the root size")
    limit = single_ratio(ctx.delta)
    lhs, base = ctx.total("pos"), ctx.total("srpt")
    ok = lhs <= limit * base and not shift_facts
    return CheckResult(
        "pos_vs_srpt", _verdict(ok), lhs, limit * base, _ratio(lhs, base), limit, {"shift_facts": shift_facts}
    )


def _check_swap_delta_sum(ctx: _Context) -> CheckResult:
    audit = spt_to_pos_delta_audit(ctx.spt1, ctx.pos)
    spt, pos = audit.spt_total, audit.pos_total
    ok = audit.consistent and audit.nonnegative and spt <= pos
    return CheckResult(
        "swap_delta_sum",
        _verdict(ok),
        spt,
        pos,
        _ratio(spt, pos),
        Fraction(1),
        {
            "steps": len(audit.steps),
            "negative_steps": audit.negative_pairs,
            "delta_sum": fmt(audit.delta_sum),
            "bookkeeping_exact": audit.consistent,
            "all_steps_contiguous": all(step.contiguous for step in audit.steps),
        },
    )


def _check_spt_vs_srpt(ctx: _Context) -> CheckResult:
    limit = single_ratio(ctx.delta)
    lhs, base = ctx.total("spt1"), ctx.total("srpt")
    return CheckResult("spt_vs_srpt", _verdict(lhs <= limit * base), lhs, limit * base, _ratio(lhs, base), limit)


def _check_srpt_vs_opt(ctx: _Context) -> CheckResult:
    opt = ctx.opt(1)
    if opt is None:
        return CheckResult("srpt_vs_opt", SKIPPED)
    lhs = ctx.total("srpt")
    return CheckResult(
        "srpt_vs_opt",
        _verdict(lhs <= opt.total),
        lhs,
        opt.total,
        _ratio(lhs, opt.total),
        Fraction(1),
        {"opt_compact": is_compact(opt.schedule), "opt_nodes": opt.nodes},
    )


def _check_spt_vs_opt_single(ctx: _Context) -> CheckResult:
    opt = ctx.opt(1)
    if opt is None:
        return CheckResult("spt_vs_opt_single", SKIPPED)
    limit = single_ratio(ctx.delta)
    lhs = ctx.total("spt1")
    return CheckResult(
        "spt_vs_opt_single", _verdict(lhs <= limit * opt.total), lhs, limit * opt.total, _ratio(lhs, opt.total), limit
    )


def _check_virtual_speedup(ctx: _Context) -> CheckResult:
    inst = ctx.instance
    m = inst.machines
    slack = 1 - Fraction(1, m)
    c_spt, c_omms = ctx.spt.completions(), ctx.omms.completions()
    per_job = [
        job.id for job in inst.jobs if c_spt[job.id] - c_omms[job.id] > slack * job.processing
    ]
    lhs = ctx.total("spt")
    rhs = ctx.total("omms") + slack * inst.n
    combined_rhs = single_ratio(ctx.delta) * ctx.total("sptm") + slack * inst.n
    return CheckResult(
        "virtual_speedup",
        _verdict(not per_job and lhs <= rhs),
        lhs,
        rhs,
        _ratio(lhs, rhs),
        Fraction(1),
        {
            "per_job_violations": per_job,
            "summed_holds": lhs <= rhs,
            "omms_valid": validate_schedule(ctx.omms).ok,
            "combined_bound_holds": lhs <= combined_rhs,
        },
    )


def _window_members(schedule, blocks) -> list[tuple[int, ...]]:
    """Jobs each schedule runs between a block's first release and the next block's first release."""
    starts, ends = schedule.starts(), schedule.completions()
    out = []
    for w, block in enumerate(blocks):
        hi = blocks[w + 1].release if w + 1 < len(blocks) else None
        out.append(
            tuple(
                sorted(
                    j
                    for j in starts
                    if starts[j] >= block.release and (hi is None or ends[j] <= hi)
                )
            )
        )
    return out


def _loose_blocks(schedule, blocks, machines: int) -> list[int]:
    """Blocks whose jobs do not run back to back from the block's first release."""
    jobs = schedule.instance.by_id
    starts, ends = schedule.starts(), schedule.completions()
    out = []
    for block in blocks:
        work = sum((jobs[j].processing for j in block.jobs), Fraction(0)) / machines
        first = min(starts[j] for j in block.jobs)
        last = max(ends[j] for j in block.jobs)
        if first != block.release or last != block.release + work:
            out.append(block.index)
    return out


def _check_block_sets(ctx: _Context) -> CheckResult:
    blocks = ctx.blocks
    expected = [b.jobs for b in blocks]
    in_omms = _window_members(ctx.omms, blocks)
    in_sptm = _window_members(ctx.sptm, blocks)
    ok = in_omms == expected and in_sptm == expected
    m = ctx.instance.machines
    return CheckResult(
        "block_sets",
        _verdict(ok),
        details={
            "blocks": len(blocks),
            "omms_matches_blocks": in_omms == expected,
            "sptm_matches_blocks": in_sptm == expected,
            "omms_compact": is_compact(ctx.omms),
            "omms_idle_gaps": len(compactness_gaps(ctx.omms)),
            "omms_loose_blocks": _loose_blocks(ctx.omms, blocks, m),
            "sptm_loose_blocks": _loose_blocks(ctx.sptm, blocks, m),
        },
    )


def _dsptm_unit(ctx: _Context, jobs) -> Fraction:
    if ctx.options.dsptm_unit == "literal":
        return Fraction(1)
    return min(ctx.instance.by_id[j].processing for j in jobs) / ctx.instance.machines


def block_chain_sums(ctx: _Context) -> list[dict]:
    """Per block: OMMS, D-SPTM and SPTM stretch sums plus the chain's bound."""
    inst = ctx.instance
    jobs = inst.by_id
    s_omms = stretch_report(ctx.omms, validate=False).stretches
    s_sptm = stretch_report(ctx.sptm, validate=False).stretches
    c_sptm = ctx.sptm.completions()
    rows = []
    global_delta = ctx.delta
    global_unit = _dsptm_unit(ctx, jobs)
    if ctx.options.delta_scope == "global":
        dsptm = dsptm_schedule(ctx.sptm, global_delta, global_unit)
        c_dsptm = dsptm.completions()
    for block in ctx.blocks:
        if ctx.options.delta_scope == "global":
            delta, shift = global_delta, dsptm_shift(global_delta, global_unit)
            completions = {j: c_dsptm[j] for j in block.jobs}
        else:
            sizes = [jobs[j].processing for j in block.jobs]
            delta = max(sizes) / min(sizes)
            shift = dsptm_shift(delta, _dsptm_unit(ctx, block.jobs))
            completions = {j: c_sptm[j] + shift for j in block.jobs}
        omms = sum((s_omms[j] for j in block.jobs), Fraction(0))
        sptm = sum((s_sptm[j] for j in block.jobs), Fraction(0))
        d_sptm = sum(((completions[j] - jobs[j].release) / jobs[j].processing for j in block.jobs), Fraction(0))
        rows.append(
            {
                "block": block.index,
                "delta": delta,
                "shift": shift,
                "omms": omms,
                "dsptm": d_sptm,
                "sptm": sptm,
                "bound": single_ratio(delta) * sptm,
                "mechanism": all(completions[j] - c_sptm[j] == shift for j in block.jobs),
            }
        )
    return rows


def _check_block_chain(ctx: _Context) -> CheckResult:
    rows = ctx._get("chain", lambda: block_chain_sums(ctx))
    first = [r["block"] for r in rows if not r["omms"] <= r["dsptm"]]
    second = [r["block"] for r in rows if not r["dsptm"] <= r["bound"]]
    mechanism = all(r["mechanism"] for r in rows)
    g_omms = sum((r["omms"] for r in rows), Fraction(0))
    g_dsptm = sum((r["dsptm"] for r in rows), Fraction(0))
    g_bound = sum((r["bound"] for r in rows), Fraction(0))
    worst = max((r["dsptm"] / r["sptm"] for r in rows), default=None)
    ok = not first and not second and mechanism
    return CheckResult(
        "block_chain",
        _verdict(ok),
        g_omms,
        g_bound,
        worst,
        single_ratio(ctx.delta) if ctx.options.delta_scope == "global" else None,
        {
            "blocks": len(rows),
            "first_inequality_violations": first,
            "second_inequality_violations": second,
            "delay_mechanism_exact": mechanism,
            "global_first_holds": g_omms <= g_dsptm,
            "global_second_holds": g_dsptm <= g_bound,
            "delta_scope": ctx.options.delta_scope,
            "dsptm_unit": ctx.options.dsptm_unit,
        },
    )


def _check_sptm_lower_bound(ctx: _Context) -> CheckResult:
    opt = ctx.opt(ctx.instance.machines)
    if opt is None:
        return CheckResult("sptm_lower_bound", SKIPPED)
    bound = parallel_lower_bound(ctx.instance).value
    return CheckResult(
        "sptm_lower_bound",
        _verdict(opt.total >= bound),
        bound,
        opt.total,
        _ratio(bound, opt.total),
        Fraction(1),
        {"n_le_opt": ctx.instance.n <= opt.total},
    )


def _check_spt_vs_opt_parallel(ctx: _Context) -> CheckResult:
    opt = ctx.opt(ctx.instance.machines)
    if opt is None:
        return CheckResult("spt_vs_opt_parallel", SKIPPED)
    limit = competitive_bound(ctx.delta, ctx.instance.machines).value
    lhs = ctx.total("spt")
    ok = lhs <= limit * opt.total and ctx.instance.n <= opt.total
    return CheckResult(
        "spt_vs_opt_parallel", _verdict(ok), lhs, limit * opt.total, _ratio(lhs, opt.total), limit, {"n_le_opt": ctx.instance.n <= opt.total}
    )


_RUNNERS = {
    "pos_compactness": _check_pos_compactness,
    "pos_vs_srpt": _check_pos_vs_srpt,
    "swap_delta_sum": _check_swap_delta_sum,
    "spt_vs_srpt": _check_spt_vs_srpt,
    "srpt_vs_opt": _check_srpt_vs_opt,
    "spt_vs_opt_single": _check_spt_vs_opt_single,
    "virtual_speedup": _check_virtual_speedup,
    "block_sets": _check_block_sets,
    "block_chain": _check_block_chain,
    "sptm_lower_bound": _check_sptm_lower_bound,
    "spt_vs_opt_parallel": _check_spt_vs_opt_parallel,
}


@dataclass(frozen=True)
class InstanceReport:
    index: int
    label: str
    instance: Instance
    delta: Fraction
    totals: dict[str, Fraction | None]
    checks: tuple[CheckResult, ...]

    @property
    def failed(self) -> bool:
        return any(check.failed for check in self.checks)

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)


def evaluate_instance(
    instance: Instance,
    options: Options | None = None,
    checks: tuple[str, ...] = CHECKS,
    index: int = 0,
    label: str = "",
) -> InstanceReport:
    options = options or Options()
    unknown = set(checks) - set(_RUNNERS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    ctx = _Context(instance, options)
    results = tuple(_RUNNERS[name](ctx) for name in CHECKS if name in checks)
    totals: dict[str, Fraction | None] = {}
    for key, attr in (("spt", "spt"), ("spt_single", "spt1"), ("srpt", "srpt"), ("pos", "pos"),
                      ("omms", "omms"), ("sptm", "sptm")):
        if attr in ctx._cache:
            totals[key] = ctx.total(attr)
    if "sptm" in ctx._cache:
        rows = ctx._get("chain", lambda: block_chain_sums(ctx))
        totals["dsptm"] = sum((r["dsptm"] for r in rows), Fraction(0))
    for machines, key in ((1, "opt_single"), (instance.machines, "opt")):
        cached = ctx._cache.get(f"opt{machines}")
        if cached is not None:
            totals[key] = cached.total
    return InstanceReport(index, label, instance, ctx.delta, totals, results)


@dataclass(frozen=True)
class BatchConfig:
    seed: int = 0
    trials: int = 100
    n_min: int = 1
    n_max: int = 8
    m_values: tuple[int, ...] = (1, 2, 3)
    delta_max_values: tuple[Fraction, ...] = (Fraction(2), Fraction(3), Fraction(5))
    modes: tuple[str, ...] = MODES
    tie_bias: Fraction = Fraction(1, 4)
    grid: int = 6
    include_families: bool = False
    checks: tuple[str, ...] = CHECKS
    options: Options = field(default_factory=Options)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "m_values": list(self.m_values),
            "delta_max_values": [fmt(d) for d in self.delta_max_values],
            "modes": list(self.modes),
            "tie_bias": fmt(self.tie_bias),
            "grid": self.grid,
            "include_families": self.include_families,
            "checks": list(self.checks),
            "oracle_budget": self.options.budget if self.options.budget is not None else default_budget(),
            "oracle_max_n": self.options.oracle_max_n,
            "delta_scope": self.options.delta_scope,
            "dsptm_unit": self.options.dsptm_unit,
        }


def batch_instances(config: BatchConfig) -> list[tuple[str, Instance]]:
    """The batch's instances, a pure function of the config."""
    rng = Stream(config.seed)
    out = []
    for trial in range(config.trials):
        gen = GenConfig(
            seed=rng.word(),
            n=rng.between(config.n_min, config.n_max),
            m=config.m_values[rng.below(len(config.m_values))],
            delta_max=config.delta_max_values[rng.below(len(config.delta_max_values))],
            mode=config.modes[rng.below(len(config.modes))],
            tie_bias=config.tie_bias,
            grid=config.grid,
            shuffle_ids=bool(rng.below(2)),
        )
        out.append((f"random:{gen.mode}:n={gen.n}:m={gen.m}:dmax={fmt(gen.delta_max)}:seed={gen.seed}",
                    random_instance(gen)))
    if config.include_families:
        for m in config.m_values:
            out.append((f"wait-pays:1:m={m}", adversarial_family("wait-pays", 1, machines=m)))
            out.append((f"nested-trees:2:m={m}", adversarial_family("nested-trees", 2, machines=m)))
            out.append((f"equal-p:3:m={m}", adversarial_family("equal-p", 3, machines=m)))
    return out


@dataclass(frozen=True)
class CheckReport:
    config: BatchConfig
    instances: tuple[InstanceReport, ...]
    generated_at: str = ""

    @property
    def ok(self) -> bool:
        return not any(report.failed for report in self.instances)

    def summary(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for name in self.config.checks:
            counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
            worst: Fraction | None = None
            worst_at = None
            limit_at_worst = None
            for report in self.instances:
                result = report.check(name)
                counts[result.verdict] += 1
                if result.ratio is not None and (worst is None or result.ratio > worst):
                    worst, worst_at, limit_at_worst = result.ratio, report.index, result.limit
            out[name] = {
                "counts": counts,
                "worst_ratio": worst,
                "worst_instance": worst_at,
                "limit_at_worst": limit_at_worst,
            }
        return out


def _evaluate_job(args) -> InstanceReport:
    index, label, instance, options, checks = args
    return evaluate_instance(instance, options, checks, index, label)


def verify(config: BatchConfig, workers: int = 1) -> CheckReport:
    """Generate the batch and evaluate every requested check on each instance.

    Reports are ordered by instance index whatever the worker count.
    """
    jobs = [(i, label, inst, config.options, config.checks) for i, (label, inst) in enumerate(batch_instances(config))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_evaluate_job, jobs, chunksize=8))
    else:
        reports = [_evaluate_job(job) for job in jobs]
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return CheckReport(config, tuple(reports), generated_at=f"stretchsched {__version__} {stamp}")
