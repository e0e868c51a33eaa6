"""m-machine reduction: the m-speed virtual machine and the schedules built on it.

A virtual schedule is stored on one unit-speed machine with processing
times p_j/m; it records ``speed = m`` and references the original instance,
so stretches default to the original p_j in the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, Job, Schedule, ScheduleError, Segment, StretchConvention, fmt
from .single import SPT, spt_schedule

OMMS = "omms"
SPTM = "sptm"
DSPTM = "dsptm"


@dataclass(frozen=True)
class VirtualInstance:
    base: Instance
    scaled: Instance

    @property
    def m(self) -> int:
        return self.base.machines

    @property
    def processing(self) -> dict[int, Fraction]:
        return {job.id: job.processing for job in self.scaled.jobs}


def virtual_instance(instance: Instance) -> VirtualInstance:
    m = instance.machines
    scaled = Instance(tuple(Job(j.id, j.release, j.processing / m) for j in instance.jobs), 1)
    return VirtualInstance(instance, scaled)


def _virtual(instance: Instance, segments, policy: str) -> Schedule:
    return Schedule(
        instance,
        tuple(segments),
        preemptive=False,
        speed=Fraction(instance.machines),
        convention=StretchConvention.ORIGINAL,
        policy=policy,
    )


def omms_schedule(spt: Schedule) -> Schedule:
    """Sequence the parallel SPT jobs on the virtual machine by SPT start time.

    Equal start times go to the shorter job first, then the smaller id. A job
    starts at the later of its release and its predecessor's end.
    """
    if spt.policy != SPT or spt.is_virtual:
        raise ScheduleError(f"OMMS transforms a parallel SPT schedule, got policy {spt.policy!r}")
    instance = spt.instance
    m = instance.machines
    jobs = instance.by_id
    starts = spt.starts()
    order = sorted(starts, key=lambda j: (starts[j], jobs[j].processing, j))
    t = Fraction(0)
    segments = []
    for j in order:
        begin = max(t, jobs[j].release)
        t = begin + jobs[j].processing / m
        segments.append(Segment(begin, t, 0, j))
    return _virtual(instance, segments, OMMS)


def sptm_schedule(virtual: VirtualInstance) -> Schedule:
    """SPT on the virtual instance (one machine, processing times p_j/m)."""
    inner = spt_schedule(virtual.scaled)
    return _virtual(virtual.base, inner.segments, SPTM)


def dsptm_shift(delta: Fraction, unit: Fraction = Fraction(1)) -> Fraction:
    return (delta - 1 / delta) * unit


def dsptm_schedule(sptm: Schedule, delta: Fraction, unit: Fraction = Fraction(1)) -> Schedule:
    """Delay every SPTM segment by ``(delta - 1/delta) * unit``.

    ``unit`` is the length of one time unit; 1 takes the delay literally.
    """
    if sptm.policy != SPTM:
        raise ScheduleError(f"D-SPTM delays an SPTM schedule, got policy {sptm.policy!r}")
    delta = Fraction(delta)
    if delta < 1:
        raise ScheduleError(f"delta must be >= 1, got {delta}")
    shift = dsptm_shift(delta, Fraction(unit))
    return _virtual(sptm.instance, (seg.shifted(shift) for seg in sptm.segments), DSPTM)


@dataclass(frozen=True)
class Block:
    """Release groups whose virtual work runs compactly before the next group arrives."""

    index: int
    jobs: tuple[int, ...]
    boundary: int
    release: Fraction
    work_end: Fraction

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "jobs": list(self.jobs),
            "b_w": self.boundary,
            "release": fmt(self.release),
            "work_end": fmt(self.work_end),
        }


def partition_blocks(virtual: VirtualInstance) -> list[Block]:
    """Greedy scan over distinct release times.

    A block starting at release r(i) keeps absorbing the next release group
    while the accumulated virtual work started at r(i) reaches that release;
    it closes at the first group it cannot reach (work ends strictly before).
    """
    groups: dict[Fraction, list[Job]] = {}
    for job in virtual.scaled.jobs:
        groups.setdefault(job.release, []).append(job)
    releases = sorted(groups)
    blocks: list[Block] = []
    i = 0
    while i < len(releases):
        first = releases[i]
        members: list[Job] = []
        end = first
        while True:
            members.extend(groups[releases[i]])
            end += sum((job.processing for job in groups[releases[i]]), Fraction(0))
            i += 1
            if i >= len(releases) or end < releases[i]:
                break
        blocks.append(
            Block(
                index=len(blocks) + 1,
                jobs=tuple(sorted(job.id for job in members)),
                boundary=i,
                release=first,
                work_end=end,
            )
        )
    return blocks


def busy_periods(schedule: Schedule) -> list[tuple[Fraction, Fraction, tuple[int, ...]]]:
    """Maximal idle-free stretches of a single-machine schedule and the jobs run in each."""
    if schedule.machines != 1:
        raise ScheduleError("busy periods are computed on single-machine schedules")
    periods: list[list] = []
    for seg in schedule.segments:
        if periods and seg.start <= periods[-1][1]:
            periods[-1][1] = max(periods[-1][1], seg.end)
            periods[-1][2].add(seg.job_id)
        else:
            periods.append([seg.start, seg.end, {seg.job_id}])
    return [(a, b, tuple(sorted(ids))) for a, b, ids in periods]
