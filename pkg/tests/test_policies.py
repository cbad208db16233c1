from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slacksched import (Instance, Job, NotEligible, SingleThreshold, TwoThreshold,
                        admission_routine, eligible_now, parse_policy, single_threshold_decide,
                        two_threshold_decide)

from conftest import positive

RUN = (F(1), F(1), F(1))  # (p, rho, w)


def test_eligible_now():
    job = Job.make(0, 0, "3/2", 1, [1])
    assert eligible_now(job, 0, F(0), F(1))
    assert not eligible_now(job, 0, F(1, 100), F(1))
    later = Job.make(1, 1, 5, 1, [1])
    assert not eligible_now(later, 0, F(1, 2), F(1))
    with pytest.raises(NotEligible):
        eligible_now(Job.make(2, 0, 5, 1, ["inf"]), 0, F(0), F(1))


@pytest.mark.parametrize("cand, admit, branch", [
    ((F(1, 2), F(8), F(4)), True, "small"),      # 1/2 <= eps/2 and 8 >= 8/eps, both at equality
    ((F(1, 2), F(79, 10), F(79, 20)), False, None),
    ((F(4, 5), F(5), F(4)), True, "middle"),     # 1/2 < 4/5 <= 1 and 4 >= 4
    ((F(4, 5), F(99, 20), F(99, 25)), False, None),
    ((F(2), F(39, 10), F(39, 5)), False, None),  # large branch needs rho >= 4
    ((F(2), F(4), F(8)), True, "large"),
])
def test_two_threshold_branches(cand, admit, branch):
    d = two_threshold_decide(cand, RUN, F(1))
    assert (d.admit, d.branch) == (admit, branch)


def test_two_threshold_small_branch_uses_eps():
    # eps=1/2: small means p* <= p/4 and the density bar is 16
    assert two_threshold_decide((F(1, 4), F(16), F(4)), RUN, F(1, 2)).branch == "small"
    assert not two_threshold_decide((F(1, 4), F(15), F(15, 4)), RUN, F(1, 2)).admit
    # just above p/4 falls in the middle band and needs 4x weight
    assert not two_threshold_decide((F(26, 100), F(15), F(39, 10)), RUN, F(1, 2)).admit


def test_empty_machine_always_admits():
    assert two_threshold_decide((F(1), F(1, 100), F(1, 100)), None, F(1)).admit
    assert single_threshold_decide((F(1), F(1, 100)), None, F(1, 2)).admit


def test_single_threshold():
    assert single_threshold_decide((F(1), F(2)), (F(1), F(1)), F(1, 2)).admit
    assert not single_threshold_decide((F(1), F(3, 2)), (F(1), F(1)), F(1, 2)).admit


@given(positive, positive, positive, st.fractions(min_value=F(1, 50), max_value=1))
def test_policies_agree_on_empty_machines(p, w, eps, gamma):
    rho = w / p
    assert two_threshold_decide((p, rho, w), None, eps).admit == \
        single_threshold_decide((p, rho), None, gamma).admit == True


@given(st.fractions(min_value=F(1, 64), max_value=1), positive, positive, positive, positive)
def test_observation_one(eps, pj, wj, pk, wk):
    rj, rk = wj / pj, wk / pk
    if eps / 2 * pj < pk <= pj:
        if wk >= 4 * wj:
            assert rk >= 4 * rj
        else:
            assert rk < 8 / eps * rj
    if pk > pj and rk >= 4 * rj:
        assert wk >= 4 * wj


@given(st.fractions(min_value=F(1, 64), max_value=1), positive, positive, positive, positive)
def test_two_threshold_admission_dominates_density(eps, p0, w0, p1, w1):
    if two_threshold_decide((p1, w1 / p1, w1), (p0, w0 / p0, w0), eps).admit:
        assert w1 / p1 > w0 / p0


def test_parse_policy():
    assert parse_policy("single-threshold:1/3", 1).gamma == F(1, 3)
    assert parse_policy("two-threshold", 3).epsilon == 1
    for bad in ("single-threshold", "two-threshold:1", "greedy", "single-threshold:2"):
        with pytest.raises(ValueError):
            parse_policy(bad, 1)


def test_policy_clamps_epsilon():
    assert TwoThreshold(F(5)).epsilon == 1
    assert SingleThreshold(F(1, 2), F(3)).epsilon == 1


def _inst(m, jobs):
    return Instance.make(m, 1, [Job.make(k, *j) for k, j in enumerate(jobs)])


def test_routine_admits_densest_and_rejects_the_rest():
    # densities 5 and 3, same size: 3 < 4*5 so the middle branch fails
    inst = _inst(1, [(0, 4, 5, [1]), (0, 4, 3, [1])])
    ds = admission_routine(inst, [0, 1], {}, F(0), TwoThreshold(F(1)))
    assert [(d.job, d.admit, d.parent) for d in ds] == [(0, True, None), (1, False, None)]


def test_routine_machine_order():
    inst = _inst(2, [(0, 4, 1, [1, 1])])
    ds = admission_routine(inst, [0], {}, F(0), TwoThreshold(F(1)))
    assert [(d.job, d.machine, d.admit) for d in ds] == [(0, 0, True)]


def test_routine_tries_next_machine_after_rejection():
    # job 0 runs on machine 0; job 1 cannot beat it there but machine 1 is idle
    inst = _inst(2, [(0, 10, 4, [1, "inf"]), (0, 10, 1, [1, 1])])
    ds = admission_routine(inst, [1], {0: [0]}, F(0), TwoThreshold(F(1)))
    assert [(d.job, d.machine, d.admit, d.parent) for d in ds] == \
        [(1, 0, False, None), (1, 1, True, None)]


def test_routine_records_parent_and_updates_running():
    # densest candidate 2 interrupts job 0 via the small branch (1 <= 2/2, 9 >= 8*1/2);
    # job 1 is then weighed against job 2, not job 0, and 8 < 4*9 rejects it
    inst = _inst(1, [(0, 10, 1, [2]), (0, 10, 8, [1]), (0, 10, 9, [1])])
    ds = admission_routine(inst, [1, 2], {0: [0]}, F(0), TwoThreshold(F(1)))
    assert [(d.job, d.admit, d.parent, d.branch) for d in ds] == \
        [(2, True, 0, "small"), (1, False, None, None)]
