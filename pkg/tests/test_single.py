from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import instances
from stretchsched.model import Instance, ScheduleError, is_compact, stretch_report, validate_schedule
from stretchsched.single import finished_count, spt_schedule, srpt_schedule

TICK = Fraction(1, 6)


def tick_srpt(instance):
    """Slot-by-slot SRPT on a 1/6 grid: completion times only."""
    jobs = instance.jobs
    left = {j.id: j.processing for j in jobs}
    started = set()
    done = {}
    running = None
    t = Fraction(0)
    while len(done) < len(jobs):
        ready = [j for j in jobs if j.release <= t and j.id not in done]
        if not ready:
            running = None
            t += TICK
            continue
        job = min(
            ready,
            key=lambda j: (left[j.id], j.id != running, j.id not in started, j.processing, j.id),
        )
        running = job.id
        started.add(job.id)
        left[job.id] -= TICK
        t += TICK
        if left[job.id] == 0:
            done[job.id] = t
            running = None
    return done


def tick_spt(instance):
    """Slot-by-slot non-waiting SPT on a 1/6 grid: (start, machine) per job."""
    m = instance.machines
    free = [Fraction(0)] * m
    placed = {}
    t = Fraction(0)
    while len(placed) < instance.n:
        for k in range(m):
            if free[k] > t:
                continue
            waiting = [j for j in instance.jobs if j.release <= t and j.id not in placed]
            if not waiting:
                break
            job = min(waiting, key=lambda j: (j.processing, j.id))
            placed[job.id] = (t, k)
            free[k] = t + job.processing
        t += TICK
    return placed


def test_srpt_single_job():
    sched = srpt_schedule(Instance.from_tuples([(0, 1)]))
    assert [(s.start, s.end) for s in sched.segments] == [(0, 1)]
    assert stretch_report(sched).total == 1


def test_srpt_preempts_long_job():
    sched = srpt_schedule(Instance.from_tuples([(0, 3), (1, 1)]))
    assert [(s.job_id, s.start, s.end) for s in sched.segments] == [(1, 0, 1), (2, 1, 2), (1, 2, 4)]
    rep = stretch_report(sched)
    assert rep.stretches == {1: Fraction(4, 3), 2: 1}
    assert rep.total == Fraction(7, 3)


def test_srpt_keeps_running_job_on_tie():
    sched = srpt_schedule(Instance.from_tuples([(0, 2), (1, 1)]))
    assert [(s.job_id, s.start, s.end) for s in sched.segments] == [(1, 0, 2), (2, 2, 3)]
    assert stretch_report(sched).total == 3


def test_srpt_single_machine_only():
    with pytest.raises(ScheduleError):
        srpt_schedule(Instance.from_tuples([(0, 1)], machines=2))


def test_spt_examples():
    sched = spt_schedule(Instance.from_tuples([(0, 3), (1, 1)]))
    assert [(s.job_id, s.start, s.end) for s in sched.segments] == [(1, 0, 3), (2, 3, 4)]
    assert stretch_report(sched).total == 4

    sched = spt_schedule(Instance.from_tuples([(0, 2), (0, 2), (0, 1)], machines=2))
    got = {s.job_id: (s.machine, s.start, s.end) for s in sched.segments}
    assert got == {3: (0, 0, 1), 1: (1, 0, 2), 2: (0, 1, 3)}
    assert stretch_report(sched).total == Fraction(7, 2)

    sched = spt_schedule(Instance.from_tuples([(0, 1)], machines=4))
    assert [(s.machine, s.start, s.end) for s in sched.segments] == [(0, 0, 1)]


def test_finished_count():
    inst = Instance.from_tuples([(0, 3), (1, 1)])
    sched = srpt_schedule(inst)
    assert finished_count(sched, Fraction(0)) == 0
    assert finished_count(sched, Fraction(2)) == 1
    assert finished_count(sched, sched.makespan()) == inst.n


@given(instances(max_n=6))
def test_srpt_matches_slot_simulation(inst):
    sched = srpt_schedule(inst)
    assert validate_schedule(sched).ok
    assert sched.completions() == tick_srpt(inst)
    assert is_compact(sched)


@given(instances(max_n=6, machines=st.integers(1, 3)))
def test_spt_matches_slot_simulation(inst):
    sched = spt_schedule(inst)
    assert validate_schedule(sched).ok
    assert is_compact(sched)
    got = {s.job_id: (s.start, s.machine) for s in sched.segments}
    assert got == tick_spt(inst)


@given(instances(max_n=7))
def test_srpt_preempts_only_on_release(inst):
    sched = srpt_schedule(inst)
    releases = {j.release for j in inst.jobs}
    completions = sched.completions()
    for seg in sched.segments:
        if seg.end != completions[seg.job_id]:
            assert seg.end in releases
