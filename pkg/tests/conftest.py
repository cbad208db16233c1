from fractions import Fraction

import pytest
from hypothesis import strategies as st

from slacksched import Instance, Job

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def one_machine(eps, *jobs):
    """jobs given as (r, d, w, p) tuples of rational literals."""
    return Instance.make(1, eps, [Job.make(k, r, d, w, [p]) for k, (r, d, w, p) in enumerate(jobs)])


fractions = st.fractions(min_value=Fraction(-50), max_value=Fraction(50), max_denominator=60)
positive = st.fractions(min_value=Fraction(1, 60), max_value=Fraction(60), max_denominator=60)
