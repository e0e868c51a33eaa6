from __future__ import annotations

from fractions import Fraction

import pytest

from stretchsched.model import (
    Instance,
    Job,
    Schedule,
    ScheduleError,
    Segment,
    StretchConvention,
    as_time,
    compactness_gaps,
    decimal,
    delta_ratio,
    fmt,
    is_compact,
    stretch_report,
    total_stretch,
    validate_schedule,
)


def one(instance, *pieces, preemptive=False, speed=1):
    return Schedule(instance, tuple(Segment(*p) for p in pieces), preemptive=preemptive, speed=speed)


def test_as_time_accepts_exact_values_only():
    assert as_time(3) == Fraction(3)
    assert as_time("5/6") == Fraction(5, 6)
    assert as_time(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        as_time(0.5)
    with pytest.raises(TypeError):
        as_time(True)


def test_fmt_always_has_denominator():
    assert fmt(Fraction(4)) == "4/1"
    assert fmt(Fraction(-7, 3)) == "-7/3"
    assert decimal(Fraction(1, 3)) == "0.333333333333"


def test_job_rejects_bad_values():
    with pytest.raises(ScheduleError):
        Job(1, 0, 0)
    with pytest.raises(ScheduleError):
        Job(1, -1, 1)
    with pytest.raises(ScheduleError):
        Instance((Job(1, 0, 1), Job(1, 1, 1)))
    with pytest.raises(ScheduleError):
        Instance((Job(1, 0, 1),), machines=0)


def test_from_tuples_numbers_pairs():
    inst = Instance.from_tuples([(0, 3), (1, 1)])
    assert [j.id for j in inst.jobs] == [1, 2]
    assert inst.job(2).release == 1
    assert Instance.from_tuples([(7, 0, 1)]).jobs[0].id == 7


def test_valid_single_job():
    inst = Instance.from_tuples([(0, 1)])
    assert validate_schedule(one(inst, (0, 1, 0, 1))).ok


def test_start_before_release():
    inst = Instance.from_tuples([(1, 1)])
    assert "start before release" in validate_schedule(one(inst, (0, 1, 0, 1))).kinds()


def test_overlap_on_machine():
    inst = Instance.from_tuples([(0, 2)])
    sched = one(inst, (0, 1, 0, 1), (Fraction(1, 2), Fraction(3, 2), 0, 1), preemptive=True)
    assert "overlap" in validate_schedule(sched).kinds()


def test_other_violations():
    inst = Instance.from_tuples([(0, 2), (0, 1)], machines=1)
    kinds = validate_schedule(one(inst, (0, 1, 0, 1), (1, 2, 3, 9))).kinds()
    assert {"work mismatch", "unknown job", "missing job"} <= kinds
    kinds = validate_schedule(one(inst, (0, 1, 0, 1), (2, 3, 0, 1), (1, 2, 0, 2))).kinds()
    assert "preempted" in kinds
    kinds = validate_schedule(one(inst, (0, 2, 0, 1), (2, 3, 1, 2))).kinds()
    assert "machine out of range" in kinds


def test_stretch_examples():
    inst = Instance.from_tuples([(0, 1)])
    assert stretch_report(one(inst, (0, 1, 0, 1))).total == 1
    inst = Instance.from_tuples([(0, 3), (1, 1)])
    rep = stretch_report(one(inst, (0, 3, 0, 1), (3, 4, 0, 2)))
    assert rep.stretches == {1: 1, 2: 3}
    assert rep.total == 4


def test_virtual_stretch_conventions():
    inst = Instance((Job(3, 0, 1),), machines=2)
    sched = Schedule(inst, (Segment(0, Fraction(1, 2), 0, 3),), speed=2)
    assert sched.machines == 1 and sched.is_virtual
    assert stretch_report(sched).stretches[3] == Fraction(1, 2)
    scaled = Schedule(inst, sched.segments, speed=2, convention=StretchConvention.SCALED)
    assert stretch_report(scaled).stretches[3] == 1


def test_stretch_report_refuses_invalid():
    inst = Instance.from_tuples([(1, 1)])
    with pytest.raises(ScheduleError):
        stretch_report(one(inst, (0, 1, 0, 1)))


def test_report_dict_is_exact():
    inst = Instance.from_tuples([(0, 3), (1, 1)])
    data = stretch_report(one(inst, (0, 3, 0, 1), (3, 4, 0, 2))).to_dict()
    assert data["total"] == "4/1"


def test_delta_ratio():
    assert delta_ratio(Instance.from_tuples([(0, 5), (1, 5)])) == 1
    assert delta_ratio(Instance.from_tuples([(0, 1), (0, 3)])) == 3
    assert delta_ratio(Instance.from_tuples([(0, 2), (0, 5)])) == Fraction(5, 2)


def test_compactness():
    inst = Instance.from_tuples([(0, 1), (2, 1)])
    assert is_compact(one(inst, (0, 1, 0, 1), (2, 3, 0, 2)))
    inst = Instance.from_tuples([(0, 1), (1, 1)])
    sched = one(inst, (0, 1, 0, 1), (2, 3, 0, 2))
    assert not is_compact(sched)
    assert compactness_gaps(sched) == [(1, 2)]
    assert is_compact(one(inst, (0, 1, 0, 1), (1, 2, 0, 2)))


def test_compactness_counts_idle_machines():
    inst = Instance.from_tuples([(0, 1), (0, 1)], machines=2)
    assert not is_compact(one(inst, (0, 1, 0, 1), (1, 2, 0, 2)))
    assert is_compact(one(inst, (0, 1, 0, 1), (0, 1, 1, 2)))


def test_total_stretch_matches_report():
    inst = Instance.from_tuples([(0, 3), (1, 1)])
    sched = one(inst, (0, 3, 0, 1), (3, 4, 0, 2))
    assert total_stretch(sched) == stretch_report(sched).total


def test_schedule_helpers():
    inst = Instance.from_tuples([(0, 3), (1, 1)])
    sched = one(inst, (0, 1, 0, 1), (2, 4, 0, 1), (1, 2, 0, 2), preemptive=True)
    assert sched.order() == [1, 2]
    assert sched.completions() == {1: 4, 2: 2}
    assert sched.starts() == {1: 0, 2: 1}
    assert sched.makespan() == 4
    assert len(sched.segments_of(1)) == 2
    with pytest.raises(ScheduleError):
        Schedule(inst, (), speed=Fraction(1, 2))
