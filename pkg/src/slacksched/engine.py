"""Event-driven simulation of an admission policy on unrelated machines."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import Instance, SchedError, density, require_valid
from .policies import AdmissionPolicy, TwoThreshold, admission_routine, for_instance

log = logging.getLogger(__name__)

ZERO = Fraction(0)


class InvariantViolation(SchedError):
    """The engine produced an outcome that breaks a guaranteed property."""


@dataclass(frozen=True)
class AdmissionRecord:
    job: int
    machine: int
    admit: Fraction
    virtual_deadline: Fraction
    parent: Optional[int] = None
    branch: Optional[str] = None


@dataclass(frozen=True)
class ScheduleSegment:
    machine: int
    job: int
    start: Fraction
    end: Fraction


@dataclass(frozen=True)
class Outcome:
    policy: str
    admissions: tuple[AdmissionRecord, ...]
    segments: tuple[ScheduleSegment, ...]
    finished: frozenset[int]
    discarded: frozenset[int]
    never_admitted: frozenset[int]
    closed: tuple[tuple[int, Fraction], ...] = ()  # (job, completion or discard time)
    admitted_weight: Fraction = ZERO
    finished_weight: Fraction = ZERO
    discarded_weight: Fraction = ZERO

    @property
    def admitted(self) -> frozenset[int]:
        return self.finished | self.discarded

    def admission(self, job_id: int) -> AdmissionRecord:
        for a in self.admissions:
            if a.job == job_id:
                return a
        raise KeyError(job_id)

    @property
    def margin(self) -> Optional[Fraction]:
        """finished / admitted weight, or None when nothing was admitted."""
        if self.admitted_weight == 0:
            return None
        return self.finished_weight / self.admitted_weight


def weight_totals(out: Outcome) -> tuple[Fraction, Fraction]:
    return out.admitted_weight, out.finished_weight


@dataclass
class _Active:
    remaining: Fraction
    vdl: Fraction
    rho: Fraction


@dataclass
class _Machine:
    active: dict[int, _Active] = field(default_factory=dict)
    open_job: Optional[int] = None
    open_start: Fraction = ZERO

    def top(self) -> Optional[int]:
        if not self.active:
            return None
        return min(self.active, key=lambda k: (-self.active[k].rho, k))


class _Run:
    def __init__(self, inst: Instance, policy: AdmissionPolicy):
        self.inst = inst
        self.policy = policy
        self.half = policy.epsilon / 2
        self.machines = [_Machine() for _ in range(inst.machines)]
        self.releases = sorted(inst.jobs, key=lambda j: (j.r, j.id))
        self.next_release = 0
        self.pending: set[int] = set()
        self.admissions: list[AdmissionRecord] = []
        self.segments: list[ScheduleSegment] = []
        self.finished: set[int] = set()
        self.discarded: set[int] = set()
        self.closed: list[tuple[int, Fraction]] = []
        self.now = ZERO

    # -- bookkeeping -------------------------------------------------
    def _close_segment(self, i: int, t: Fraction) -> None:
        m = self.machines[i]
        if m.open_job is not None and m.open_start < t:
            self.segments.append(ScheduleSegment(i, m.open_job, m.open_start, t))
        m.open_job = None

    def _sync_running(self, t: Fraction) -> None:
        for i, m in enumerate(self.machines):
            top = m.top()
            if top != m.open_job:
                self._close_segment(i, t)
                if top is not None:
                    m.open_job, m.open_start = top, t

    def _advance(self, t: Fraction) -> None:
        dt = t - self.now
        if dt:
            for m in self.machines:
                if m.open_job is not None:
                    m.active[m.open_job].remaining -= dt
        self.now = t

    def _complete(self, t: Fraction) -> bool:
        done = False
        for i, m in enumerate(self.machines):
            k = m.open_job
            if k is not None and m.active[k].remaining == 0:
                self._close_segment(i, t)
                del m.active[k]
                self.finished.add(k)
                self.closed.append((k, t))
                done = True
        return done

    def _discard_expired(self, t: Fraction) -> None:
        # a non-running job whose slack reached zero is inactive from t on
        for m in self.machines:
            top = m.top()
            for k in sorted(m.active):
                a = m.active[k]
                if k != top and a.vdl - t - a.remaining <= 0:
                    del m.active[k]
                    self.discarded.add(k)
                    log.debug("t=%s discard job %s", t, k)
                    self.closed.append((k, t))

    def _release(self, t: Fraction) -> bool:
        released = False
        while self.next_release < len(self.releases) and self.releases[self.next_release].r == t:
            self.pending.add(self.releases[self.next_release].id)
            self.next_release += 1
            released = True
        return released

    def _admit(self, t: Fraction) -> None:
        active = {i: list(m.active) for i, m in enumerate(self.machines)}
        for d in admission_routine(self.inst, sorted(self.pending), active, t, self.policy):
            if not d.admit:
                continue
            job = self.inst.job(d.job)
            p = job.p[d.machine]
            rho = density(job, d.machine)
            if d.parent is not None:
                parent_rho = self.machines[d.machine].active[d.parent].rho
                if rho < parent_rho:
                    raise InvariantViolation(
                        f"job {d.job} (density {rho}) admitted over denser job {d.parent}")
            vdl = t + (1 + self.half) * p
            self.machines[d.machine].active[d.job] = _Active(p, vdl, rho)
            self.pending.discard(d.job)
            self.admissions.append(AdmissionRecord(d.job, d.machine, t, vdl, d.parent, d.branch))
            log.debug("t=%s admit job %s to machine %s (%s, parent %s)",
                      t, d.job, d.machine, d.branch, d.parent)

    def _next_event(self) -> Optional[Fraction]:
        times = []
        if self.next_release < len(self.releases):
            times.append(self.releases[self.next_release].r)
        for m in self.machines:
            top = m.open_job
            for k, a in m.active.items():
                t = self.now + a.remaining if k == top else a.vdl - a.remaining
                if t > self.now:
                    times.append(t)
        return min(times) if times else None

    # -- main loop ---------------------------------------------------
    def run(self) -> Outcome:
        t = self._next_event()
        while t is not None:
            self._advance(t)
            completed = self._complete(t)
            self._discard_expired(t)
            released = self._release(t)
            if completed or released:
                self._admit(t)
                self._discard_expired(t)
            self._sync_running(t)
            t = self._next_event()
        return self._outcome()

    def _outcome(self) -> Outcome:
        w = {j.id: j.w for j in self.inst.jobs}
        admitted = self.finished | self.discarded
        never = {j.id for j in self.inst.jobs} - admitted
        return Outcome(
            policy=self.policy.name,
            admissions=tuple(self.admissions),
            segments=tuple(sorted(self.segments, key=lambda s: (s.machine, s.start))),
            finished=frozenset(self.finished),
            discarded=frozenset(self.discarded),
            never_admitted=frozenset(never),
            closed=tuple(self.closed),
            admitted_weight=sum((w[k] for k in admitted), ZERO),
            finished_weight=sum((w[k] for k in self.finished), ZERO),
            discarded_weight=sum((w[k] for k in self.discarded), ZERO),
        )


def simulate(inst: Instance, policy: AdmissionPolicy, *, strict: bool = True) -> Outcome:
    """Simulate ``policy`` on ``inst`` and return the full trace.

    The policy's slack is rebound to ``inst.epsilon`` (clamped to 1).  With
    ``strict`` set, a two-threshold run that finishes less than half of the
    admitted weight raises :class:`InvariantViolation`.
    """
    require_valid(inst)
    policy = for_instance(policy, inst)
    out = _Run(inst, policy).run()
    if strict and isinstance(policy, TwoThreshold) and 2 * out.finished_weight < out.admitted_weight:
        raise InvariantViolation(
            f"finished weight {out.finished_weight} < half of admitted {out.admitted_weight}")
    return out
