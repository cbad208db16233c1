from fractions import Fraction

import pytest
from hypothesis import given

from slacksched import (INF, BadSlack, Instance, Job, NotEligible, clamp_epsilon, density,
                        rational, validate_instance)
from slacksched.core import fmt

from conftest import fractions, one_machine, positive


def test_density():
    job = Job.make(0, 0, 10, 3, [2, 1, "inf"])
    assert density(job, 0) == Fraction(3, 2)
    assert density(Job.make(1, 0, 10, 1, [1]), 0) == 1
    with pytest.raises(NotEligible):
        density(Job.make(2, 0, 10, 5, ["inf"]), 0)


def test_clamp_epsilon():
    assert clamp_epsilon(2) == 1
    assert clamp_epsilon("1/2") == Fraction(1, 2)
    with pytest.raises(BadSlack):
        clamp_epsilon(0)
    with pytest.raises(BadSlack):
        clamp_epsilon("-1/3")


def test_slack_boundary_is_valid():
    assert validate_instance(one_machine("1/2", (0, "3/2", 1, 1))).ok


def test_slack_violation_names_job_and_machine():
    report = validate_instance(one_machine("1/2", (0, "5/4", 1, 1)))
    assert [(v.kind, v.job, v.machine) for v in report.violations] == [("slack violation", 0, 0)]


def test_every_violation_kind_reported():
    inst = Instance.make(2, "1/2", [
        Job.make(0, 0, 10, 1, ["inf", "inf"]),
        Job.make(0, 0, 10, 0, [1, 1]),
        Job.make(2, 0, 10, 1, [1]),
    ])
    kinds = {v.kind for v in validate_instance(inst).violations}
    assert kinds == {"no eligible machine", "duplicate id", "non-positive weight",
                     "proc length mismatch"}


def test_slack_checked_only_on_eligible_machines():
    inst = Instance.make(2, 1, [Job.make(0, 0, 2, 1, [1, "inf"])])
    assert validate_instance(inst).ok


def test_rational_parsing():
    assert rational("3/2") == Fraction(3, 2)
    assert rational("6/4") == Fraction(3, 2)
    assert rational(7) == 7
    assert fmt(Fraction(6, 4)) == "3/2"
    assert fmt(Fraction(4)) == "4"
    assert fmt(INF) == "inf"
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(ValueError):
        rational("0.5")


@given(fractions, fractions)
def test_rational_roundtrips(a, b):
    assert (a + b) - b == a
    if b:
        assert (a * b) / b == a
    assert rational(fmt(a)) == a
    assert (a < b) + (a == b) + (a > b) == 1


@given(positive, positive, positive)
def test_density_monotone(w, p, bump):
    base = density(Job.make(0, 0, 1, w, [p]), 0)
    assert density(Job.make(0, 0, 1, w + bump, [p]), 0) > base
    assert density(Job.make(0, 0, 1, w, [p + bump]), 0) < base


def test_jobs_are_immutable():
    job = Job.make(0, 0, 2, 1, [1])
    with pytest.raises(Exception):
        job.w = Fraction(2)
