"""Event-driven SRPT (preemptive, one machine) and SPT (non-preemptive, m machines).

Both share one tie discipline: keep the running job, then prefer smaller
processing time, then smaller job id. SRPT additionally resumes an already
started job before opening a fresh one with equal remaining work.
"""

from __future__ import annotations

import heapq
from fractions import Fraction

from .model import Instance, Schedule, ScheduleError, Segment

SRPT = "srpt"
SPT = "spt"


def _by_release(instance: Instance) -> list:
    return sorted(instance.jobs, key=lambda job: (job.release, job.processing, job.id))


def srpt_schedule(instance: Instance) -> Schedule:
    """Preemptive shortest-remaining-processing-time schedule on one machine.

    A running job is only preempted when a release brings a job with strictly
    smaller remaining work.
    """
    if instance.machines != 1:
        raise ScheduleError(f"SRPT is single-machine only, instance has {instance.machines} machines")
    pending = _by_release(instance)
    remaining = {job.id: job.processing for job in instance.jobs}
    segments: list[Segment] = []
    # heap entries: (remaining, fresh flag, initial p, id); queued remaining never changes
    ready: list[tuple[Fraction, int, Fraction, int]] = []
    running = None
    run_start = Fraction(0)
    t = Fraction(0)
    i = 0
    while i < len(pending) or ready or running is not None:
        if running is None and not ready:
            t = max(t, pending[i].release)
        while i < len(pending) and pending[i].release <= t:
            job = pending[i]
            heapq.heappush(ready, (job.processing, 1, job.processing, job.id))
            i += 1

        if running is None:
            running = heapq.heappop(ready)
            run_start = t
        elif ready and ready[0][0] < remaining[running[3]]:
            rid = running[3]
            if t > run_start:
                segments.append(Segment(run_start, t, 0, rid))
            heapq.heappush(ready, (remaining[rid], 0, running[2], rid))
            running = heapq.heappop(ready)
            run_start = t

        rid = running[3]
        finish = t + remaining[rid]
        next_release = pending[i].release if i < len(pending) else None
        if next_release is None or finish <= next_release:
            segments.append(Segment(run_start, finish, 0, rid))
            remaining[rid] = Fraction(0)
            t = finish
            running = None
        else:
            remaining[rid] -= next_release - t
            t = next_release
    return Schedule(instance, tuple(segments), preemptive=True, policy=SRPT)


def spt_schedule(instance: Instance) -> Schedule:
    """Non-preemptive, non-waiting shortest-processing-time list schedule.

    Whenever a machine is idle and jobs are waiting, the shortest waiting job
    starts on the lowest-indexed idle machine.
    """
    m = instance.machines
    pending = _by_release(instance)
    free_at = [Fraction(0)] * m
    ready: list[tuple[Fraction, int]] = []
    segments: list[Segment] = []
    t = Fraction(0)
    i = 0
    placed = 0
    while placed < len(pending):
        while i < len(pending) and pending[i].release <= t:
            heapq.heappush(ready, (pending[i].processing, pending[i].id))
            i += 1
        for machine in range(m):
            if not ready:
                break
            if free_at[machine] <= t:
                p, job_id = heapq.heappop(ready)
                segments.append(Segment(t, t + p, machine, job_id))
                free_at[machine] = t + p
                placed += 1
        events = [f for f in free_at if f > t]
        if i < len(pending):
            events.append(pending[i].release)
        if not events:
            break
        t = min(events)
    return Schedule(instance, tuple(segments), preemptive=False, policy=SPT)


def finished_count(schedule: Schedule, t: Fraction) -> int:
    """Number of jobs completed by time ``t``."""
    return sum(1 for c in schedule.completions().values() if c <= t)
