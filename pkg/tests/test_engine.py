from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slacksched import (Instance, InvalidInstance, Outcome, RandomSpec, ScheduleSegment,
                        SingleThreshold, TwoThreshold, check_admissions, check_feasibility,
                        gen_example2, gen_random, simulate, weight_totals)
from slacksched.engine import AdmissionRecord, _Run
from slacksched.harness import run_check

from conftest import one_machine


def segs(out):
    return [(s.machine, s.job, s.start, s.end) for s in out.segments]


def test_single_job():
    inst = one_machine(1, (0, 2, 1, 1))
    out = simulate(inst, TwoThreshold(F(1)))
    assert [(a.job, a.admit, a.parent) for a in out.admissions] == [(0, 0, None)]
    assert segs(out) == [(0, 0, 0, 1)]
    assert out.finished == {0} and out.finished_weight == 1


def test_second_job_admitted_on_completion():
    inst = one_machine(1, (0, 4, 1, 1), (0, 4, 1, 1))
    out = simulate(inst, TwoThreshold(F(1)))
    assert [(a.job, a.admit) for a in out.admissions] == [(0, 0), (1, 1)]
    assert segs(out) == [(0, 0, 0, 1), (0, 1, 1, 2)]
    assert out.finished_weight == 2


def test_example2_single_threshold_trace():
    # rho_2 = (25/6)/2 = 25/12 >= 2 = rho_1/gamma, so job 1 interrupts job 0 at 1/100.
    # Job 0 then has 199/100 left against a virtual deadline of 5/2: slack 1/2,
    # exhausted at 51/100.
    inst = gen_example2(F(1, 2), F(1, 2), F(1, 100))
    out = simulate(inst, SingleThreshold(F(1, 2)))
    assert [(a.job, a.admit, a.parent) for a in out.admissions] == \
        [(0, 0, None), (1, F(1, 100), 0)]
    assert segs(out) == [(0, 0, 0, F(1, 100)), (0, 1, F(1, 100), F(201, 100))]
    assert dict(out.closed) == {0: F(51, 100), 1: F(201, 100)}
    assert out.discarded == {0} and out.finished == {1}
    assert out.finished_weight == F(25, 6)


def test_example2_two_threshold_keeps_first_job():
    # equal sizes -> middle band, and 25/6 < 4*2
    inst = gen_example2(F(1, 2), F(1, 2), F(1, 100))
    out = simulate(inst, TwoThreshold(F(1, 2)))
    assert out.finished == {0} and out.never_admitted == {1}
    assert out.finished_weight == 2


def test_completion_wins_over_discard_at_same_instant():
    # eps=gamma=1: job 1 runs [1/100, 101/100); job 0's slack hits zero exactly then,
    # but the machine frees up at the same instant and job 0 finishes at its
    # virtual deadline 3.
    inst = gen_example2(F(1), F(1), F(1, 100))
    out = simulate(inst, SingleThreshold(F(1)))
    assert out.finished == {0, 1}
    assert segs(out)[-1] == (0, 0, F(101, 100), F(3))
    assert out.admission(0).virtual_deadline == 3
    assert not check_feasibility(out, inst)


def test_weight_totals():
    empty = simulate(Instance.make(1, 1, []), TwoThreshold(F(1)))
    assert weight_totals(empty) == (0, 0)
    assert weight_totals(simulate(one_machine(1, (0, 2, 3, 1)), TwoThreshold(F(1)))) == (3, 3)
    # job 1 interrupts job 0 through the middle band (2 < 3 <= 4, 4 >= 4*1) and runs
    # [1, 4); job 0's slack of 2 runs out at 3
    inst = one_machine(1, (0, 8, 1, 4), (1, 7, 4, 3))
    out = simulate(inst, TwoThreshold(F(1)))
    assert out.discarded == {0} and out.finished == {1}
    assert dict(out.closed)[0] == 3
    assert weight_totals(out) == (5, 4)


def test_invalid_instance_rejected():
    with pytest.raises(InvalidInstance):
        simulate(one_machine("1/2", (0, "5/4", 1, 1)), TwoThreshold(F(1, 2)))


def _outcome(segments, finished=(), discarded=(), admissions=(), closed=()):
    return Outcome("hand", tuple(admissions), tuple(segments), frozenset(finished),
                   frozenset(discarded), frozenset(), tuple(closed))


def test_check_flags_overlap():
    inst = one_machine(1, (0, 10, 1, 2), (0, 10, 1, 2))
    base = simulate(inst, TwoThreshold(F(1)))
    bad = _outcome([ScheduleSegment(0, 0, F(0), F(2)), ScheduleSegment(0, 1, F(1), F(3))],
                   base.finished, (), base.admissions, base.closed)
    kinds = {v.kind for v in check_feasibility(bad, inst)}
    assert "machine overlap" in kinds


def test_check_flags_under_processing():
    inst = one_machine(1, (0, 10, 1, 2))
    adm = (AdmissionRecord(0, 0, F(0), F(3)),)
    bad = _outcome([ScheduleSegment(0, 0, F(0), F(1))], {0}, (), adm, ((0, F(1)),))
    kinds = {v.kind for v in check_feasibility(bad, inst)}
    assert "under-processed" in kinds


def test_admitted_job_runs_immediately():
    inst = gen_random(RandomSpec(seed=3, n=15, m=2, eps=F(1, 4), horizon=F(4)))
    out = simulate(inst, TwoThreshold(inst.epsilon))
    for a in out.admissions:
        starts = {s.start for s in out.segments if s.job == a.job}
        displaced = any(b.parent == a.job and b.admit == a.admit for b in out.admissions)
        assert a.admit in starts or displaced


def test_deterministic():
    inst = gen_random(RandomSpec(seed=11, n=20, m=3, eps=F(1, 2)))
    assert simulate(inst, TwoThreshold(F(1, 2))) == simulate(inst, TwoThreshold(F(1, 2)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 14), st.integers(1, 3),
       st.sampled_from([F(1, 4), F(1, 2), F(1), F(2)]),
       st.sampled_from([F(2), F(5), F(20)]))
def test_trace_properties(seed, n, m, eps, horizon):
    inst = gen_random(RandomSpec(seed=seed, n=n, m=m, eps=eps, horizon=horizon,
                                 size=(F(1, 4), F(8)), weight=(F(1), F(64))))
    for pol in (TwoThreshold(eps), SingleThreshold(F(1, 3)), SingleThreshold(F(1))):
        out = simulate(inst, pol)
        assert check_feasibility(out, inst) == []
        assert check_admissions(out, inst, pol) == []
        if isinstance(pol, TwoThreshold):
            assert 2 * out.finished_weight >= out.admitted_weight


def test_skipping_discards_is_caught(monkeypatch):
    monkeypatch.setattr(_Run, "_discard_expired", lambda self, t: None)
    report = run_check(seeds=60, oracle_n=0, max_n=20)
    feas = report.results["feasibility"]
    assert not feas.passed
    assert any(f.startswith("seed ") for f in feas.failures)
