from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from stretchsched.model import Instance, Job

settings.register_profile("default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def sixths(lo: int, hi: int):
    return st.integers(lo, hi).map(lambda k: Fraction(k, 6))


@st.composite
def instances(draw, max_n: int = 7, machines=st.just(1), max_release: int = 60, max_size: int = 30):
    n = draw(st.integers(1, max_n))
    releases = draw(st.lists(sixths(0, max_release), min_size=n, max_size=n))
    sizes = draw(st.lists(sixths(6, max_size), min_size=n, max_size=n))
    m = draw(machines)
    return Instance(tuple(Job(i + 1, r, p) for i, (r, p) in enumerate(zip(releases, sizes))), m)


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    """Remember one acceptance verdict line for the terminal summary."""
    ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
