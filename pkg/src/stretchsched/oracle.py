"""Brute-force optimal non-preemptive schedules, bound formulas and swap-delta algebra."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, Schedule, ScheduleError, Segment, delta_ratio, fmt, total_stretch
from .parallel import busy_periods, sptm_schedule, virtual_instance
from .single import spt_schedule, srpt_schedule

OPT = "opt"
DEFAULT_BUDGET = 5_000_000


class OracleLimitError(RuntimeError):
    """The search would exceed its node budget; no approximate answer is returned."""

    def __init__(self, budget: int, n: int, m: int) -> None:
        self.budget = budget
        super().__init__(f"oracle limit: more than {budget} search nodes for n={n}, m={m}")


def default_budget() -> int:
    return int(os.environ.get("STRETCH_ORACLE_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class OracleResult:
    schedule: Schedule
    total: Fraction
    nodes: int


def _integer_times(instance: Instance) -> tuple[list[int], list[int], list[int], int, int]:
    """Releases and processing times scaled to integers, plus per-job integer weights.

    Integer weight w_j = L / P_j with L = lcm(P), so sum_j w_j * flow_j = L * total stretch.
    """
    scale = 1
    for job in instance.jobs:
        scale = math.lcm(scale, job.release.denominator, job.processing.denominator)
    releases = [int(job.release * scale) for job in instance.jobs]
    sizes = [int(job.processing * scale) for job in instance.jobs]
    common = 1
    for p in sizes:
        common = math.lcm(common, p)
    weights = [common // p for p in sizes]
    return releases, sizes, weights, scale, common


def optimal_nonpreemptive(instance: Instance, budget: int | None = None) -> OracleResult:
    """Exact minimum total stretch over all non-preemptive schedules.

    Depth-first branch and bound over (job, machine) placements. Every
    schedule is timed greedily (start = max(release, machine free time)),
    which dominates any idle-inserting variant of the same per-machine order.
    Placements are generated in non-decreasing (start, machine) order and
    empty machines are opened lowest-index first, so each per-machine
    assignment up to machine relabelling is visited once.
    """
    if budget is None:
        budget = default_budget()
    n, m = instance.n, instance.machines
    if n == 0:
        return OracleResult(Schedule(instance, ()), Fraction(0), 0)
    releases, sizes, weights, scale, common = _integer_times(instance)
    order = sorted(range(n), key=lambda j: instance.jobs[j].id)

    # seed the bound with SPT, allowing ties so the first optimum in DFS order wins
    seed = spt_schedule(instance)
    best_cost = int(total_stretch(seed) * common) + 1
    best_plan: list[tuple[int, int, int]] | None = None

    avail = [0] * m
    used = [False] * m
    plan: list[tuple[int, int, int]] = []
    done = [False] * n
    nodes = 0

    def search(cost: int, last: tuple[int, int], placed: int) -> None:
        nonlocal best_cost, best_plan, nodes
        nodes += 1
        if nodes > budget:
            raise OracleLimitError(budget, n, m)
        if placed == n:
            if cost < best_cost:
                best_cost = cost
                best_plan = list(plan)
            return
        floor = max(last[0], min(avail))
        bound = cost
        for j in range(n):
            if not done[j]:
                bound += (max(releases[j], floor) + sizes[j] - releases[j]) * weights[j]
        if bound >= best_cost:
            return
        for j in order:
            if done[j]:
                continue
            for k in range(m):
                if not used[k] and any(not used[q] for q in range(k)):
                    continue
                start = max(releases[j], avail[k])
                if (start, k) <= last:
                    continue
                end = start + sizes[j]
                step = (end - releases[j]) * weights[j]
                if cost + step >= best_cost:
                    continue
                saved_avail, saved_used = avail[k], used[k]
                avail[k], used[k], done[j] = end, True, True
                plan.append((j, k, start))
                search(cost + step, (start, k), placed + 1)
                plan.pop()
                avail[k], used[k], done[j] = saved_avail, saved_used, False

    search(0, (-1, -1), 0)
    if best_plan is None:
        raise RuntimeError("search finished without reaching the SPT seed; pruning bound is unsound")
    segments = [
        Segment(
            Fraction(start, scale),
            Fraction(start + sizes[j], scale),
            k,
            instance.jobs[j].id,
        )
        for j, k, start in best_plan
    ]
    schedule = Schedule(instance, tuple(segments), preemptive=False, policy=OPT)
    return OracleResult(schedule, Fraction(best_cost, common), nodes)


def exhaustive_optimum(instance: Instance) -> Fraction:
    """Plain enumeration of every machine assignment and per-machine order.

    Pure Fraction arithmetic, no pruning; only practical for n <= 6.
    """
    jobs = instance.jobs
    m = instance.machines
    best = None
    for assignment in itertools.product(range(m), repeat=len(jobs)):
        lanes = [[job for job, k in zip(jobs, assignment) if k == machine] for machine in range(m)]
        lane_best = []
        for lane in lanes:
            lane_min = None
            for perm in itertools.permutations(lane):
                t = Fraction(0)
                cost = Fraction(0)
                for job in perm:
                    t = max(t, job.release) + job.processing
                    cost += (t - job.release) / job.processing
                if lane_min is None or cost < lane_min:
                    lane_min = cost
            lane_best.append(lane_min or Fraction(0))
        total = sum(lane_best, Fraction(0))
        if best is None or total < best:
            best = total
    return best if best is not None else Fraction(0)


@dataclass(frozen=True)
class DominanceCheck:
    srpt_total: Fraction
    opt_total: Fraction

    @property
    def passed(self) -> bool:
        return self.srpt_total <= self.opt_total


def srpt_dominates_optimal_check(instance: Instance, budget: int | None = None) -> DominanceCheck:
    """SRPT total stretch against the non-preemptive optimum on one machine."""
    single = instance.with_machines(1)
    srpt = total_stretch(srpt_schedule(single))
    opt = optimal_nonpreemptive(single, budget).total
    return DominanceCheck(srpt, opt)


def swap_delta(p_j: Fraction, p_k: Fraction) -> Fraction:
    """Stretch change when job j moves ahead of job k: p_j/p_k - p_k/p_j.

    Negative exactly when p_j < p_k.
    """
    p_j, p_k = Fraction(p_j), Fraction(p_k)
    if p_j <= 0 or p_k <= 0:
        raise ValueError("processing times must be positive")
    return p_j / p_k - p_k / p_j


@dataclass(frozen=True)
class AuditStep:
    position: int
    moved: int
    displaced: tuple[int, ...]
    delta: Fraction
    contiguous: bool


@dataclass(frozen=True)
class DeltaAudit:
    steps: tuple[AuditStep, ...]
    spt_total: Fraction
    pos_total: Fraction

    @property
    def delta_sum(self) -> Fraction:
        return sum((step.delta for step in self.steps), Fraction(0))

    @property
    def consistent(self) -> bool:
        return self.delta_sum == self.pos_total - self.spt_total

    @property
    def nonnegative(self) -> bool:
        return self.delta_sum >= 0

    @property
    def negative_pairs(self) -> int:
        return sum(1 for step in self.steps if step.delta < 0)


def spt_to_pos_delta_audit(spt: Schedule, pos: Schedule) -> DeltaAudit:
    """Turn the SPT order into the POS order one first-difference at a time.

    Each step moves the job POS runs at the first differing position in
    front of the SPT jobs occupying positions i..j-1; its stretch change is
    the sum of the pairwise swap deltas. A step is ``contiguous`` when the
    moved job and the displaced jobs share one busy period, which is what
    makes the pairwise sum the exact change of that step.
    """
    if spt.instance.jobs != pos.instance.jobs or spt.machines != 1 or pos.machines != 1:
        raise ScheduleError("audit needs two single-machine schedules of the same instance")
    jobs = spt.instance.by_id
    inverse = {j: 1 / job.processing for j, job in jobs.items()}
    period = {}
    for index, (_, _, ids) in enumerate(busy_periods(spt)):
        for j in ids:
            period[j] = index
    current = spt.order()
    target = pos.order()
    steps = []
    for i in range(len(target)):
        if current[i] == target[i]:
            continue
        j = target[i]
        at = current.index(j, i)
        displaced = current[i:at]
        p_j = jobs[j].processing
        work = sum((jobs[k].processing for k in displaced), Fraction(0))
        inv = sum((inverse[k] for k in displaced), Fraction(0))
        delta = p_j * inv - work / p_j
        contiguous = all(period[k] == period[j] for k in displaced)
        steps.append(AuditStep(i, j, tuple(displaced), delta, contiguous))
        current[i : at + 1] = [j, *displaced]
    return DeltaAudit(tuple(steps), total_stretch(spt), total_stretch(pos))


@dataclass(frozen=True)
class BoundCertificate:
    kind: str
    delta: Fraction
    m: int
    value: Fraction
    formula: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "delta": fmt(self.delta),
            "m": self.m,
            "value": fmt(self.value),
            "formula": self.formula,
        }


def single_ratio(delta: Fraction) -> Fraction:
    return delta - 1 / delta + 1


def parallel_ratio(delta: Fraction, m: int) -> Fraction:
    return delta - 1 / delta + Fraction(3, 2) - Fraction(1, 2 * m)


def competitive_bound(delta: Fraction, m: int = 1) -> BoundCertificate:
    delta = Fraction(delta)
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m == 1:
        return BoundCertificate("single_ratio", delta, 1, single_ratio(delta), "delta - 1/delta + 1")
    return BoundCertificate(
        "parallel_ratio", delta, m, parallel_ratio(delta, m), "delta - 1/delta + 3/2 - 1/(2m)"
    )


def parallel_lower_bound(instance: Instance) -> BoundCertificate:
    """SPTM total stretch (original p_j denominators) plus (1/2)(1 - 1/m) n."""
    m = instance.machines
    sptm = total_stretch(sptm_schedule(virtual_instance(instance)))
    value = sptm + Fraction(1, 2) * (1 - Fraction(1, m)) * instance.n
    return BoundCertificate(
        "parallel_lower_bound",
        delta_ratio(instance),
        m,
        value,
        "sum_sptm + (1/2)(1 - 1/m) n",
    )
