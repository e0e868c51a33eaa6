"""Core types on exact rational time, schedule validation and stretch metrics."""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union

TimeLike = Union[int, str, Fraction]


class ScheduleError(ValueError):
    """Raised when a schedule or instance is malformed for the requested operation."""


def as_time(value: TimeLike) -> Fraction:
    """Coerce an int, "num/den" string or Fraction to an exact time.

    Floats are refused: every time quantity in this package is exact.
    """
    if type(value) is Fraction:
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not time values")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"unsupported time value {value!r} ({type(value).__name__}); floats are not allowed")


def fmt(value: Fraction) -> str:
    """Render a rational as "num/den", always with an explicit denominator."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def decimal(value: Fraction, digits: int = 12) -> str:
    """Display-only decimal rendering with `digits` significant digits."""
    return f"{float(value):.{digits}g}"


@dataclass(frozen=True)
class Job:
    id: int
    release: Fraction
    processing: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "release", as_time(self.release))
        object.__setattr__(self, "processing", as_time(self.processing))
        if self.processing <= 0:
            raise ScheduleError(f"job {self.id}: processing time must be positive, got {self.processing}")
        if self.release < 0:
            raise ScheduleError(f"job {self.id}: release date must be non-negative, got {self.release}")


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    machines: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if self.machines < 1:
            raise ScheduleError(f"machine count must be >= 1, got {self.machines}")
        ids = [job.id for job in self.jobs]
        if len(set(ids)) != len(ids):
            raise ScheduleError("job ids must be unique")

    @classmethod
    def from_tuples(cls, rows: Iterable[tuple], machines: int = 1) -> "Instance":
        """Build from ``(release, processing)`` or ``(id, release, processing)`` rows.

        Two-element rows are numbered 1, 2, ... in order.
        """
        jobs = []
        for index, row in enumerate(rows, start=1):
            if len(row) == 2:
                jobs.append(Job(index, *row))
            else:
                jobs.append(Job(*row))
        return cls(tuple(jobs), machines)

    @property
    def n(self) -> int:
        return len(self.jobs)

    def job(self, job_id: int) -> Job:
        for job in self.jobs:
            if job.id == job_id:
                return job
        raise KeyError(job_id)

    @property
    def by_id(self) -> dict[int, Job]:
        return {job.id: job for job in self.jobs}

    def with_machines(self, machines: int) -> "Instance":
        return Instance(self.jobs, machines)


class StretchConvention(str, Enum):
    """Which processing time divides the flow time of a job."""

    ORIGINAL = "original_processing"
    SCALED = "scaled_processing"


@dataclass(frozen=True, order=True)
class Segment:
    """A half-open execution piece ``[start, end)`` of one job on one machine."""

    start: Fraction
    end: Fraction
    machine: int
    job_id: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", as_time(self.start))
        object.__setattr__(self, "end", as_time(self.end))

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    def shifted(self, offset: Fraction) -> "Segment":
        return Segment(self.start + offset, self.end + offset, self.machine, self.job_id)


@dataclass(frozen=True)
class Schedule:
    """Execution segments for every job of an instance.

    ``speed`` is 1 for real machines and m for the m-speed virtual machine;
    a virtual schedule has a single machine (index 0). ``policy`` records
    which algorithm produced the schedule so that downstream transformations
    can refuse inputs they were not designed for.
    """

    instance: Instance
    segments: tuple[Segment, ...]
    preemptive: bool = False
    speed: Fraction = Fraction(1)
    convention: StretchConvention = StretchConvention.ORIGINAL
    policy: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(sorted(self.segments)))
        object.__setattr__(self, "speed", as_time(self.speed))
        if self.speed < 1:
            raise ScheduleError(f"speed must be >= 1, got {self.speed}")

    @property
    def machines(self) -> int:
        return 1 if self.speed != 1 else self.instance.machines

    @property
    def is_virtual(self) -> bool:
        return self.speed != 1

    def segments_of(self, job_id: int) -> list[Segment]:
        return [seg for seg in self.segments if seg.job_id == job_id]

    def completions(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for seg in self.segments:
            if seg.job_id not in out or seg.end > out[seg.job_id]:
                out[seg.job_id] = seg.end
        return out

    def starts(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for seg in self.segments:
            if seg.job_id not in out or seg.start < out[seg.job_id]:
                out[seg.job_id] = seg.start
        return out

    def order(self) -> list[int]:
        """Job ids by first start time (machine index breaks ties)."""
        first: dict[int, tuple[Fraction, int]] = {}
        for seg in self.segments:
            key = (seg.start, seg.machine)
            if seg.job_id not in first or key < first[seg.job_id]:
                first[seg.job_id] = key
        return sorted(first, key=lambda j: (first[j], j))

    def makespan(self) -> Fraction:
        return max((seg.end for seg in self.segments), default=Fraction(0))

    def denominator(self, job: Job) -> Fraction:
        if self.convention is StretchConvention.SCALED:
            return job.processing / self.speed
        return job.processing


@dataclass(frozen=True)
class Violation:
    kind: str
    job_id: int | None
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_schedule(schedule: Schedule) -> ValidationResult:
    """Check every schedule invariant and list the violations found."""
    found: list[Violation] = []
    jobs = schedule.instance.by_id
    per_job: dict[int, list[Segment]] = defaultdict(list)
    per_machine: dict[int, list[Segment]] = defaultdict(list)

    for seg in schedule.segments:
        if seg.job_id not in jobs:
            found.append(Violation("unknown job", seg.job_id, f"segment {seg} refers to an unknown job"))
            continue
        if not 0 <= seg.machine < schedule.machines:
            found.append(Violation("machine out of range", seg.job_id, f"segment {seg} uses machine {seg.machine}"))
        if seg.start >= seg.end:
            found.append(Violation("empty segment", seg.job_id, f"segment {seg} has start >= end"))
        if seg.start < jobs[seg.job_id].release:
            found.append(
                Violation(
                    "start before release",
                    seg.job_id,
                    f"job {seg.job_id} starts at {fmt(seg.start)} before its release {fmt(jobs[seg.job_id].release)}",
                )
            )
        per_job[seg.job_id].append(seg)
        per_machine[seg.machine].append(seg)

    for machine, segs in per_machine.items():
        segs.sort()
        for a, b in zip(segs, segs[1:]):
            if b.start < a.end:
                found.append(
                    Violation("overlap", b.job_id, f"machine {machine}: {a} overlaps {b}")
                )

    for job_id, job in jobs.items():
        segs = sorted(per_job.get(job_id, []))
        if not segs:
            found.append(Violation("missing job", job_id, f"job {job_id} is never executed"))
            continue
        for a, b in zip(segs, segs[1:]):
            if b.start < a.end:
                found.append(Violation("self overlap", job_id, f"job {job_id} runs twice at once: {a}, {b}"))
        work = sum((seg.length for seg in segs), Fraction(0)) * schedule.speed
        if work != job.processing:
            found.append(
                Violation(
                    "work mismatch",
                    job_id,
                    f"job {job_id} receives {fmt(work)} units of work, needs {fmt(job.processing)}",
                )
            )
        if not schedule.preemptive and len(segs) != 1:
            found.append(
                Violation("preempted", job_id, f"non-preemptive schedule splits job {job_id} into {len(segs)} pieces")
            )
    return ValidationResult(tuple(found))


@dataclass(frozen=True)
class JobStretch:
    job_id: int
    completion: Fraction
    flow: Fraction
    stretch: Fraction


@dataclass(frozen=True)
class StretchReport:
    """Per-job completion, flow and stretch with weights w_j = 1/p_j."""

    jobs: tuple[JobStretch, ...]
    total: Fraction
    convention: StretchConvention

    @property
    def stretches(self) -> dict[int, Fraction]:
        return {row.job_id: row.stretch for row in self.jobs}

    @property
    def completions(self) -> dict[int, Fraction]:
        return {row.job_id: row.completion for row in self.jobs}

    def to_dict(self) -> dict:
        return {
            "convention": self.convention.value,
            "weights": "w_j = 1/p_j",
            "total": fmt(self.total),
            "jobs": [
                {
                    "job": row.job_id,
                    "completion": fmt(row.completion),
                    "flow": fmt(row.flow),
                    "stretch": fmt(row.stretch),
                }
                for row in self.jobs
            ],
        }


def stretch_report(schedule: Schedule, *, validate: bool = True) -> StretchReport:
    if validate:
        result = validate_schedule(schedule)
        if not result.ok:
            raise ScheduleError("; ".join(v.message for v in result.violations))
    completions = schedule.completions()
    rows = []
    for job in sorted(schedule.instance.jobs, key=lambda j: j.id):
        completion = completions[job.id]
        flow = completion - job.release
        rows.append(JobStretch(job.id, completion, flow, flow / schedule.denominator(job)))
    total = sum((row.stretch for row in rows), Fraction(0))
    return StretchReport(tuple(rows), total, schedule.convention)


def total_stretch(schedule: Schedule) -> Fraction:
    """Total stretch without re-validating (callers pass schedules built here)."""
    completions = schedule.completions()
    return sum(
        ((completions[job.id] - job.release) / schedule.denominator(job) for job in schedule.instance.jobs),
        Fraction(0),
    )


def delta_ratio(instance: Instance) -> Fraction:
    """Ratio of largest to smallest processing time."""
    if not instance.jobs:
        raise ScheduleError("delta ratio of an empty instance is undefined")
    sizes = [job.processing for job in instance.jobs]
    return max(sizes) / min(sizes)


def is_compact(schedule: Schedule) -> bool:
    """True iff no machine idles while a released job could run.

    For non-preemptive schedules "could run" means released and not yet
    started; for preemptive ones, released, unfinished and not running
    elsewhere at that instant.
    """
    return not compactness_gaps(schedule)


def compactness_gaps(schedule: Schedule) -> list[tuple[Fraction, Fraction]]:
    """Elementary intervals ``[a, b)`` where a machine idles although some job is available."""
    jobs = schedule.instance.jobs
    if schedule.preemptive:
        done_at = list(schedule.completions().values())
    else:
        done_at = list(schedule.starts().values())
    raw = [job.release for job in jobs] + done_at
    raw += [t for seg in schedule.segments for t in (seg.start, seg.end)]
    # integer ticks make the sweep's comparisons cheap
    scale = math.lcm(*(t.denominator for t in raw)) if raw else 1
    tick = {t: t.numerator * (scale // t.denominator) for t in set(raw)}
    releases = sorted(tick[job.release] for job in jobs)
    done = sorted(tick[t] for t in done_at)
    seg_starts = sorted(tick[seg.start] for seg in schedule.segments)
    seg_ends = sorted(tick[seg.end] for seg in schedule.segments)
    horizon = seg_ends[-1] if seg_ends else 0
    times = sorted({0, *releases, *seg_starts, *seg_ends})
    gaps = []
    for a, b in zip(times, times[1:]):
        if a >= horizon:
            break
        busy = bisect_right(seg_starts, a) - bisect_right(seg_ends, a)
        if busy >= schedule.machines:
            continue
        # released and not yet started (or not yet finished and not running)
        waiting = bisect_right(releases, a) - bisect_right(done, a)
        if schedule.preemptive:
            waiting -= busy
        if waiting > 0:
            gaps.append((Fraction(a, scale), Fraction(b, scale)))
    return gaps
