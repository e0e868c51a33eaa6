"""Seeded instance generators and hand-built adversarial families.

Randomness comes from numpy's PCG64 bit generator, read as raw 64-bit
words (its bit stream is fixed across numpy versions and platforms).
Bounded integers use rejection sampling on those words, so no
platform-dependent float conversion is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import Instance, Job

MODES = ("dense", "sparse", "bursty")
FAMILIES = ("wait-pays", "nested-trees", "equal-p")


class Stream:
    """Deterministic integer stream over PCG64 raw output."""

    def __init__(self, seed: int) -> None:
        self._gen = np.random.PCG64(seed)

    def word(self) -> int:
        return int(self._gen.random_raw())

    def below(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        if k <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.word()
            if x < limit:
                return x % k

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def chance(self, p: Fraction) -> bool:
        p = Fraction(p)
        return self.below(p.denominator) < p.numerator

    def shuffle(self, items: list) -> list:
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


@dataclass(frozen=True)
class GenConfig:
    seed: int
    n: int
    m: int = 1
    delta_max: Fraction = Fraction(3)
    mode: str = "dense"
    tie_bias: Fraction = Fraction(0)
    grid: int = 6
    shuffle_ids: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta_max", Fraction(self.delta_max))
        object.__setattr__(self, "tie_bias", Fraction(self.tie_bias))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.delta_max < 1:
            raise ValueError(f"delta_max must be >= 1, got {self.delta_max}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.tie_bias <= 1:
            raise ValueError(f"tie_bias must lie in [0, 1], got {self.tie_bias}")
        if self.grid < 1:
            raise ValueError(f"grid must be >= 1, got {self.grid}")


def random_instance(config: GenConfig) -> Instance:
    rng = Stream(config.seed)
    d = config.grid
    top = math.floor(config.delta_max * d)

    units: list[int] = []
    for _ in range(config.n):
        if units and rng.chance(config.tie_bias):
            units.append(units[rng.below(len(units))])
        else:
            units.append(rng.between(d, top))
    sizes = [Fraction(a, d) for a in units]
    work = sum(sizes, Fraction(0))

    if config.mode == "dense":
        horizon = math.ceil(work * d / config.m)
        releases = [Fraction(rng.between(0, horizon), d) for _ in sizes]
    elif config.mode == "sparse":
        # consecutive releases further apart than all the work, so no two jobs interact
        gap = math.ceil(work) + 1
        releases = [k * gap + Fraction(rng.below(d), d) for k in range(config.n)]
    else:
        releases, sizes = _bursts(rng, sizes, d, config.m)

    ids = list(range(1, config.n + 1))
    if config.shuffle_ids:
        ids = rng.shuffle(ids)
    jobs = tuple(Job(i, r, p) for i, r, p in zip(ids, releases, sizes))
    return Instance(jobs, config.m)


def _bursts(rng: Stream, sizes: list[Fraction], d: int, m: int):
    """Clusters of releases, longest first and each a grid step later, to nest SRPT intervals."""
    releases: list[Fraction] = []
    ordered: list[Fraction] = []
    t = Fraction(0)
    i = 0
    while i < len(sizes):
        burst = sorted(sizes[i : i + rng.between(2, 5)], reverse=True)
        at = t
        for p in burst:
            releases.append(at)
            ordered.append(p)
            at += Fraction(rng.between(1, 2), d)
        burst_work = sum(burst, Fraction(0)) / m
        # the next burst lands inside or just after this one's work
        t += Fraction(rng.between(0, math.ceil(burst_work * d * 3 // 2)), d)
        i += len(burst)
    return releases, ordered


def adversarial_family(
    name: str,
    size: int,
    *,
    long: Fraction = Fraction(3),
    gap: Fraction = Fraction(1),
    offset: Fraction = Fraction(0),
    machines: int = 1,
) -> Instance:
    """Small structured instances.

    ``wait-pays``: a long job at ``offset``, then ``size`` unit jobs ``gap``
    later; any optimum idles waiting for the short jobs.
    ``nested-trees``: job k (k = 0..size) released at k with size 2**(size-k),
    so every new job preempts and SRPT nests the intervals.
    ``equal-p``: ``size`` unit jobs released at 0.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    long, gap, offset = Fraction(long), Fraction(gap), Fraction(offset)
    if name == "wait-pays":
        rows = [(offset, long)] + [(offset + gap, 1)] * size
    elif name == "nested-trees":
        rows = [(k, 2 ** (size - k)) for k in range(size + 1)]
    elif name == "equal-p":
        rows = [(0, 1)] * size
    else:
        raise ValueError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    return Instance.from_tuples(rows, machines)
