"""Containment forest over SRPT active intervals and the post-order schedule (POS)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, Schedule, ScheduleError, Segment, fmt
from .single import SRPT, srpt_schedule

POS = "pos"


class LaminarityError(ScheduleError):
    """Two active intervals overlap without one containing the other."""

    def __init__(self, outer: "ActiveInterval", inner: "ActiveInterval") -> None:
        self.pair = (outer, inner)
        super().__init__(
            f"active intervals of jobs {outer.job_id} [{fmt(outer.start)}, {fmt(outer.end)}) and "
            f"{inner.job_id} [{fmt(inner.start)}, {fmt(inner.end)}) cross"
        )


@dataclass(frozen=True)
class ActiveInterval:
    """Half-open span ``[S_j, C_j)`` between a job's first run and its SRPT completion."""

    job_id: int
    start: Fraction
    end: Fraction

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    def contains(self, other: "ActiveInterval") -> bool:
        return self.start <= other.start and other.end <= self.end

    def disjoint(self, other: "ActiveInterval") -> bool:
        return self.end <= other.start or other.end <= self.start


def active_intervals(schedule: Schedule) -> list[ActiveInterval]:
    if schedule.policy != SRPT:
        raise ScheduleError(f"active intervals are defined on SRPT schedules, got policy {schedule.policy!r}")
    starts = schedule.starts()
    ends = schedule.completions()
    out = [ActiveInterval(j, starts[j], ends[j]) for j in starts]
    out.sort(key=lambda iv: (iv.start, -iv.end, iv.job_id))
    return out


@dataclass(frozen=True)
class OrderedForest:
    intervals: dict[int, ActiveInterval]
    parent: dict[int, int | None]
    children: dict[int, tuple[int, ...]]
    roots: tuple[int, ...]

    def tree(self, root: int) -> list[int]:
        """Job ids of the subtree rooted at ``root``, in pre-order."""
        out = []
        stack = [root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(self.children[node]))
        return out

    def root_of(self, job_id: int) -> int:
        while self.parent[job_id] is not None:
            job_id = self.parent[job_id]
        return job_id

    def depth(self) -> int:
        best = 0
        for root in self.roots:
            stack = [(root, 1)]
            while stack:
                node, d = stack.pop()
                best = max(best, d)
                stack.extend((c, d + 1) for c in self.children[node])
        return best

    def to_dict(self) -> dict:
        return {
            "roots": list(self.roots),
            "nodes": [
                {
                    "job": j,
                    "parent": self.parent[j],
                    "children": list(self.children[j]),
                    "S": fmt(iv.start),
                    "C": fmt(iv.end),
                }
                for j, iv in sorted(self.intervals.items(), key=lambda kv: (kv[1].start, kv[0]))
            ],
        }


def build_forest(intervals: list[ActiveInterval]) -> OrderedForest:
    """Nest intervals with a containment stack, scanning by increasing start.

    Raises LaminarityError on a crossing pair rather than assuming laminarity.
    """
    ordered = sorted(intervals, key=lambda iv: (iv.start, -iv.end, iv.job_id))
    parent: dict[int, int | None] = {}
    children: dict[int, list[int]] = {iv.job_id: [] for iv in ordered}
    roots: list[int] = []
    stack: list[ActiveInterval] = []
    for iv in ordered:
        while stack and stack[-1].end <= iv.start:
            stack.pop()
        if stack:
            top = stack[-1]
            if not top.contains(iv):
                raise LaminarityError(top, iv)
            parent[iv.job_id] = top.job_id
            children[top.job_id].append(iv.job_id)
        else:
            parent[iv.job_id] = None
            roots.append(iv.job_id)
        stack.append(iv)
    return OrderedForest(
        intervals={iv.job_id: iv for iv in ordered},
        parent=parent,
        children={k: tuple(v) for k, v in children.items()},
        roots=tuple(roots),
    )


def pos_schedule(forest: OrderedForest, srpt: Schedule) -> Schedule:
    """Post-order schedule: per tree, the root first, then the rest by SRPT completion.

    Each tree is laid out back to back from the start of its root interval.
    """
    if srpt.policy != SRPT:
        raise ScheduleError("POS is built from an SRPT schedule")
    completions = srpt.completions()
    if set(completions) != set(forest.intervals) or any(
        forest.intervals[j].end != completions[j] for j in completions
    ):
        raise ScheduleError("forest was not built from this SRPT schedule")
    jobs = srpt.instance.by_id
    segments = []
    for root in forest.roots:
        rest = [j for j in forest.tree(root) if j != root]
        rest.sort(key=lambda j: (completions[j], jobs[j].processing, j))
        t = forest.intervals[root].start
        for j in [root, *rest]:
            segments.append(Segment(t, t + jobs[j].processing, 0, j))
            t += jobs[j].processing
    return Schedule(srpt.instance, tuple(segments), preemptive=False, policy=POS)


def pos_from_instance(instance: Instance) -> tuple[Schedule, OrderedForest, Schedule]:
    """SRPT, its forest and the resulting POS schedule."""
    srpt = srpt_schedule(instance)
    forest = build_forest(active_intervals(srpt))
    return pos_schedule(forest, srpt), forest, srpt
