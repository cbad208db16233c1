"""Post-hoc checks of a simulation trace against the instance and the policy rules.

Both checkers rebuild everything from the recorded trace and never call back
into the engine or the policy decide functions.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Optional

from .core import Instance, Violation, clamp_epsilon, density
from .engine import Outcome
from .policies import AdmissionPolicy, SingleThreshold, TwoThreshold


def _segments_by_job(out: Outcome):
    by_job = defaultdict(list)
    for s in out.segments:
        by_job[s.job].append(s)
    return by_job


def check_feasibility(out: Outcome, inst: Instance) -> list[Violation]:
    """Structural feasibility of the trace; an empty list means clean."""
    v: list[Violation] = []
    eps = clamp_epsilon(inst.epsilon)
    adm = {}
    for a in out.admissions:
        if a.job in adm:
            v.append(Violation("admitted twice", a.job, a.machine))
        adm[a.job] = a
    closed = dict(out.closed)

    if out.finished & out.discarded:
        v.append(Violation("finished and discarded", detail=str(sorted(out.finished & out.discarded))))
    if out.admitted != set(adm):
        v.append(Violation("admission set mismatch",
                           detail=f"records {sorted(adm)} vs F+U {sorted(out.admitted)}"))
    if out.never_admitted != {j.id for j in inst.jobs} - set(adm):
        v.append(Violation("never-admitted set mismatch"))

    by_machine = defaultdict(list)
    for s in out.segments:
        if not s.start < s.end:
            v.append(Violation("empty segment", s.job, s.machine, f"[{s.start}, {s.end})"))
        by_machine[s.machine].append(s)
    for i, segs in by_machine.items():
        for prev, nxt in zip(segs, segs[1:]):
            if nxt.start < prev.end:
                v.append(Violation("machine overlap", nxt.job, i,
                                   f"job {prev.job} until {prev.end}, job {nxt.job} from {nxt.start}"))

    by_job = _segments_by_job(out)
    for job in inst.jobs:
        segs = by_job.get(job.id, [])
        a = adm.get(job.id)
        if a is None:
            if segs:
                v.append(Violation("processed without admission", job.id))
            continue
        p = job.p[a.machine]
        if not job.eligible(a.machine):
            v.append(Violation("admitted to ineligible machine", job.id, a.machine))
            continue
        if a.admit < job.r:
            v.append(Violation("admitted before release", job.id, a.machine))
        if job.d - a.admit < (1 + eps / 2) * p:
            v.append(Violation("admitted too late", job.id, a.machine))
        if a.virtual_deadline != a.admit + (1 + eps / 2) * p:
            v.append(Violation("wrong virtual deadline", job.id, a.machine))
        if a.virtual_deadline > job.d:
            v.append(Violation("virtual deadline after deadline", job.id, a.machine))
        if any(s.machine != a.machine for s in segs):
            v.append(Violation("migration", job.id))
        if any(s.start < a.admit or s.end > a.virtual_deadline for s in segs):
            v.append(Violation("segment outside [admit, virtual deadline]", job.id, a.machine))
        total = sum((s.end - s.start for s in segs), Fraction(0))
        t_close = closed.get(job.id)
        if t_close is None:
            v.append(Violation("admitted job never closed", job.id))
            continue
        if any(s.end > t_close for s in segs):
            v.append(Violation("processed after close", job.id, a.machine))
        if job.id in out.finished:
            if total < p:
                v.append(Violation("under-processed", job.id, a.machine, f"{total} < {p}"))
            elif total > p:
                v.append(Violation("over-processed", job.id, a.machine, f"{total} > {p}"))
            if not segs or segs[-1].end != t_close:
                v.append(Violation("completion time mismatch", job.id, a.machine))
            if t_close > a.virtual_deadline:
                v.append(Violation("late completion", job.id, a.machine))
        elif job.id in out.discarded:
            if total >= p:
                v.append(Violation("discarded after full processing", job.id, a.machine))
            # slack is exhausted exactly at the discard instant
            if p - total != a.virtual_deadline - t_close:
                v.append(Violation("discard with slack left", job.id, a.machine,
                                   f"remaining {p - total}, window {a.virtual_deadline - t_close}"))

    v.extend(_check_running_rule(out, inst, adm, closed))

    w = {j.id: j.w for j in inst.jobs}
    if out.finished_weight != sum((w[k] for k in out.finished), Fraction(0)):
        v.append(Violation("finished weight mismatch"))
    if out.discarded_weight != sum((w[k] for k in out.discarded), Fraction(0)):
        v.append(Violation("discarded weight mismatch"))
    if out.admitted_weight != out.finished_weight + out.discarded_weight:
        v.append(Violation("admitted weight mismatch"))
    return v


def _check_running_rule(out, inst, adm, closed) -> list[Violation]:
    """Between consecutive breakpoints each machine runs its densest live job."""
    v = []
    points = set()
    for s in out.segments:
        points.update((s.start, s.end))
    points.update(a.admit for a in adm.values())
    points.update(closed.values())
    points = sorted(points)
    by_machine = defaultdict(list)
    for s in out.segments:
        by_machine[s.machine].append(s)
    for i in range(inst.machines):
        mine = [a for a in adm.values() if a.machine == i]
        segs = by_machine.get(i, [])
        for lo, hi in zip(points, points[1:]):
            live = [a.job for a in mine
                    if a.admit <= lo and closed.get(a.job, hi) >= hi]
            running = [s.job for s in segs if s.start <= lo and hi <= s.end]
            if not live:
                if running:
                    v.append(Violation("running without live job", running[0], i, f"[{lo}, {hi})"))
                continue
            want = min(live, key=lambda k: (-density(inst.job(k), i), k))
            if running != [want]:
                v.append(Violation("scheduling rule", want, i,
                                   f"[{lo}, {hi}) runs {running or 'nothing'}, densest live is {want}"))
    return v


def _branch_holds(policy: AdmissionPolicy, new, old) -> Optional[str]:
    """Re-derive which admission rule justifies ``new`` interrupting ``old``."""
    (p1, r1, w1), (p0, r0, w0) = new, old
    if isinstance(policy, SingleThreshold):
        return "ratio" if r1 >= r0 / policy.gamma else None
    eps = policy.epsilon
    if p1 <= eps * p0 / 2:
        return "small" if r1 * eps >= 8 * r0 else None
    if p1 <= p0:
        return "middle" if w1 >= 4 * w0 else None
    return "large" if r1 >= 4 * r0 else None


def check_admissions(out: Outcome, inst: Instance, policy: AdmissionPolicy) -> list[Violation]:
    """Re-derive each admission decision from the trace."""
    v: list[Violation] = []
    closed = dict(out.closed)
    segs = _segments_by_job(out)
    seen = []
    for a in out.admissions:
        job = inst.job(a.job)
        i = a.machine
        earlier = [b for b in seen if b.machine == i and
                   (closed.get(b.job, a.admit) > a.admit
                    or (b.job in out.discarded and closed.get(b.job) == a.admit))]
        seen.append(a)
        live = [b.job for b in earlier]
        top = min(live, key=lambda k: (-density(inst.job(k), i), k)) if live else None
        if a.parent != top:
            v.append(Violation("wrong parent", a.job, i, f"recorded {a.parent}, running was {top}"))
            continue
        rho = density(job, i)
        if top is None:
            if a.branch not in (None, "empty"):
                v.append(Violation("branch mismatch", a.job, i, f"{a.branch} on idle machine"))
        else:
            parent = inst.job(top)
            new = (job.p[i], rho, job.w)
            old = (parent.p[i], density(parent, i), parent.w)
            branch = _branch_holds(policy, new, old)
            if branch is None:
                v.append(Violation("admission rule not satisfied", a.job, i, f"over job {top}"))
            elif a.branch is not None and branch != a.branch:
                v.append(Violation("branch mismatch", a.job, i, f"recorded {a.branch}, derived {branch}"))
            if rho < old[1] or (isinstance(policy, TwoThreshold) and rho == old[1]):
                v.append(Violation("density dominance", a.job, i, f"{rho} vs parent {old[1]}"))
        # starts now, unless displaced by a sibling admitted at the same instant
        if top is None or rho > density(inst.job(top), i):
            starts = any(s.start == a.admit for s in segs.get(a.job, []))
            displaced = any(b.parent == a.job and b.admit == a.admit for b in out.admissions)
            if not (starts or displaced):
                v.append(Violation("did not start immediately", a.job, i, f"admitted at {a.admit}"))
        dense = [k for k in live if density(inst.job(k), i) > rho]
        if dense:
            v.append(Violation("not densest at admission", a.job, i, f"denser active jobs {dense}"))
    return v


def theorem3_holds(out: Outcome) -> bool:
    return 2 * out.finished_weight >= out.admitted_weight
