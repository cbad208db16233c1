"""Exact-arithmetic job and instance model.

Every time, size, weight and density is a :class:`fractions.Fraction`.
An infinite processing time (machine not eligible) is the float ``INF``;
it never enters arithmetic because every consumer checks eligibility first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

INF = math.inf

ProcTime = Union[Fraction, float]
RationalLike = Union[Fraction, int, str]


class SchedError(Exception):
    """Base class for errors raised by this package."""


class NotEligible(SchedError):
    """Job has infinite processing time on the requested machine."""


class BadSlack(SchedError):
    """Slack parameter is not strictly positive."""


class InvalidInstance(SchedError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


def rational(value: RationalLike) -> Fraction:
    """Parse ``"num/den"``, a bare integer string, an int or a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    text = str(value).strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not a rational literal: {value!r}")
    return Fraction(text)


def proc_time(value: RationalLike | float) -> ProcTime:
    if isinstance(value, float):
        if value == INF:
            return INF
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return INF
    p = rational(value)
    if p <= 0:
        raise ValueError(f"processing time must be positive, got {p}")
    return p


def fmt(value: ProcTime) -> str:
    """Canonical text form: ``"3/2"``, ``"4"`` or ``"inf"``."""
    if value == INF:
        return "inf"
    return str(value)


def is_finite(p: ProcTime) -> bool:
    return p != INF


@dataclass(frozen=True)
class Job:
    id: int
    r: Fraction
    d: Fraction
    w: Fraction
    p: tuple[ProcTime, ...]

    @classmethod
    def make(cls, id: int, r: RationalLike, d: RationalLike, w: RationalLike,
             p: Iterable[RationalLike | float]) -> "Job":
        return cls(id, rational(r), rational(d), rational(w),
                   tuple(proc_time(x) for x in p))

    def eligible(self, machine: int) -> bool:
        return is_finite(self.p[machine])

    def eligible_machines(self) -> list[int]:
        return [i for i, x in enumerate(self.p) if is_finite(x)]


@dataclass(frozen=True)
class Instance:
    machines: int
    epsilon: Fraction
    jobs: tuple[Job, ...]

    @classmethod
    def make(cls, machines: int, epsilon: RationalLike, jobs: Sequence[Job]) -> "Instance":
        return cls(int(machines), rational(epsilon), tuple(jobs))

    def job(self, job_id: int) -> Job:
        # ids are dense 0..n-1 for generated and loaded instances; fall back to a scan
        if 0 <= job_id < len(self.jobs) and self.jobs[job_id].id == job_id:
            return self.jobs[job_id]
        for j in self.jobs:
            if j.id == job_id:
                return j
        raise KeyError(job_id)

    @property
    def n(self) -> int:
        return len(self.jobs)


def density(job: Job, machine: int) -> Fraction:
    p = job.p[machine]
    if not is_finite(p):
        raise NotEligible(f"job {job.id} is not eligible on machine {machine}")
    return job.w / p


def clamp_epsilon(eps: RationalLike) -> Fraction:
    eps = rational(eps)
    if eps <= 0:
        raise BadSlack(f"slack must be positive, got {eps}")
    return min(eps, Fraction(1))


@dataclass(frozen=True)
class Violation:
    kind: str
    job: int | None = None
    machine: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = []
        if self.job is not None:
            where.append(f"job {self.job}")
        if self.machine is not None:
            where.append(f"machine {self.machine}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.kind}{loc}{': ' + self.detail if self.detail else ''}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(inst: Instance) -> ValidationReport:
    """Collect every model violation; an empty report means the instance is valid."""
    out: list[Violation] = []
    if inst.machines < 1:
        out.append(Violation("no machines", detail=f"m={inst.machines}"))
    if inst.epsilon <= 0:
        out.append(Violation("bad slack", detail=f"epsilon={inst.epsilon}"))
    seen: set[int] = set()
    for job in inst.jobs:
        if job.id in seen:
            out.append(Violation("duplicate id", job.id))
        seen.add(job.id)
        if job.r < 0:
            out.append(Violation("negative release", job.id, detail=f"r={job.r}"))
        if job.d <= job.r:
            out.append(Violation("empty window", job.id, detail=f"r={job.r}, d={job.d}"))
        if job.w <= 0:
            out.append(Violation("non-positive weight", job.id, detail=f"w={job.w}"))
        if len(job.p) != inst.machines:
            out.append(Violation("proc length mismatch", job.id,
                                 detail=f"{len(job.p)} entries for {inst.machines} machines"))
            continue
        eligible = job.eligible_machines()
        if not eligible:
            out.append(Violation("no eligible machine", job.id))
        for i in eligible:
            need = (1 + inst.epsilon) * job.p[i]
            if job.d - job.r < need:
                out.append(Violation("slack violation", job.id, i,
                                     f"d-r={job.d - job.r} < (1+eps)p={need}"))
    return ValidationReport(tuple(out))


def require_valid(inst: Instance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise InvalidInstance(report)
