"""Exact offline optimum over non-migratory schedules, for small instances."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .core import Instance, SchedError, require_valid
from .engine import simulate
from .policies import AdmissionPolicy

DEFAULT_CAP = 12
MAX_MACHINES = 3

Window = tuple[Fraction, Fraction, Fraction]  # (r, d, p)


class TooLarge(SchedError):
    pass


class _Unbounded:
    """Ratio of a positive optimum to zero online weight."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Unbounded"

    def __str__(self):
        return "unbounded"


Unbounded = _Unbounded()


def edf_feasible(jobs: Iterable[Window]) -> bool:
    """Preemptive earliest-deadline-first on one machine; True iff all deadlines are met."""
    todo = sorted((r, d, p, k) for k, (r, d, p) in enumerate(jobs))
    if not todo:
        return True
    ready: list[list] = []  # [d, k, remaining]
    t = todo[0][0]
    idx = 0
    while idx < len(todo) or ready:
        while idx < len(todo) and todo[idx][0] <= t:
            r, d, p, k = todo[idx]
            ready.append([d, k, p])
            idx += 1
        if not ready:
            t = todo[idx][0]
            continue
        ready.sort()
        cur = ready[0]
        horizon = todo[idx][0] if idx < len(todo) else None
        finish = t + cur[2]
        if horizon is not None and horizon < finish:
            cur[2] -= horizon - t
            t = horizon
            continue
        t = finish
        if t > cur[0]:
            return False
        ready.pop(0)
    return True


@dataclass(frozen=True)
class OracleResult:
    optimum: Fraction
    assignment: tuple[tuple[int, int], ...]  # (job id, machine), sorted by job id

    @property
    def per_machine(self) -> dict[int, list[int]]:
        sets: dict[int, list[int]] = {}
        for j, i in self.assignment:
            sets.setdefault(i, []).append(j)
        return sets


def oracle_cap() -> int:
    env = os.environ.get("SCHED_ORACLE_CAP")
    return int(env) if env else DEFAULT_CAP


def optimal_nonmigratory(inst: Instance, limit: Optional[int] = None) -> OracleResult:
    """Branch and bound over job-to-machine assignments (or rejection).

    Each machine's set is kept EDF-feasible as jobs are added, so a branch
    dies as soon as it becomes infeasible; the remaining-weight bound prunes
    the rest.
    """
    require_valid(inst)
    cap = oracle_cap() if limit is None else limit
    if inst.n > cap or inst.machines > MAX_MACHINES:
        raise TooLarge(f"oracle limited to {cap} jobs and {MAX_MACHINES} machines, "
                       f"got n={inst.n}, m={inst.machines}")
    order = sorted(inst.jobs, key=lambda j: (-j.w, j.id))
    suffix = [Fraction(0)] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + order[k].w

    m = inst.machines
    sets: list[list[Window]] = [[] for _ in range(m)]
    chosen: list[tuple[int, int]] = []
    best = [Fraction(-1), ()]
    cache: dict[tuple, bool] = {}

    def feasible(windows: list[Window]) -> bool:
        key = tuple(sorted(windows))
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = edf_feasible(windows)
        return hit

    def search(k: int, value: Fraction) -> None:
        if value + suffix[k] <= best[0]:
            return
        if k == len(order):
            best[0], best[1] = value, tuple(chosen)
            return
        job = order[k]
        for i in range(m):
            if not job.eligible(i):
                continue
            sets[i].append((job.r, job.d, job.p[i]))
            if feasible(sets[i]):
                chosen.append((job.id, i))
                search(k + 1, value + job.w)
                chosen.pop()
            sets[i].pop()
        search(k + 1, value)

    search(0, Fraction(0))
    return OracleResult(best[0], tuple(sorted(best[1])))


def competitive_ratio(inst: Instance, policy: AdmissionPolicy,
                      limit: Optional[int] = None) -> Union[Fraction, _Unbounded]:
    opt = optimal_nonmigratory(inst, limit).optimum
    got = simulate(inst, policy).finished_weight
    if got == 0:
        if opt == 0:
            raise ValueError("ratio undefined: optimum is zero")
        return Unbounded
    return opt / got


def witness_feasible(inst: Instance, result: OracleResult) -> bool:
    for i, ids in result.per_machine.items():
        windows = [(inst.job(j).r, inst.job(j).d, inst.job(j).p[i]) for j in ids]
        if not edf_feasible(windows):
            return False
    return result.optimum == sum((inst.job(j).w for j, _ in result.assignment), Fraction(0))


def brute_force_feasible(jobs: Sequence[Window]) -> bool:
    """Try every fixed priority order with preemption only at release instants.

    Independent of deadlines when ordering, so it cross-checks EDF: EDF is one
    of these orders, and any order that succeeds witnesses feasibility.
    """
    from itertools import permutations

    jobs = list(jobs)
    if not jobs:
        return True
    return any(_priority_schedule_ok(jobs, order) for order in permutations(range(len(jobs))))


def _priority_schedule_ok(jobs: Sequence[Window], order: Sequence[int]) -> bool:
    rank = {k: pos for pos, k in enumerate(order)}
    remaining = {k: jobs[k][2] for k in range(len(jobs))}
    releases = sorted({r for r, _, _ in jobs})
    t = releases[0]
    while remaining:
        ready = [k for k in remaining if jobs[k][0] <= t]
        future = [r for r in releases if r > t]
        if not ready:
            t = future[0]
            continue
        k = min(ready, key=rank.__getitem__)
        end = t + remaining[k]
        if future and future[0] < end:
            remaining[k] -= future[0] - t
            t = future[0]
            continue
        t = end
        if t > jobs[k][1]:
            return False
        del remaining[k]
    return True
