"""Canonical JSON and CSV forms; rationals are always strings like ``"3/2"``."""

from __future__ import annotations

import csv
import io
import json
from typing import Any

from .core import Instance, Job, SchedError, fmt, proc_time, rational
from .engine import AdmissionRecord, Outcome, ScheduleSegment
from .oracle import OracleResult


class FormatError(SchedError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def instance_to_dict(inst: Instance) -> dict:
    return {
        "machines": inst.machines,
        "epsilon": fmt(inst.epsilon),
        "jobs": [{"id": j.id, "r": fmt(j.r), "d": fmt(j.d), "w": fmt(j.w),
                  "p": [fmt(x) for x in j.p]} for j in inst.jobs],
    }


def instance_from_dict(data: dict) -> Instance:
    try:
        jobs = []
        for pos, raw in enumerate(data["jobs"]):
            try:
                jobs.append(Job(int(raw["id"]), rational(raw["r"]), rational(raw["d"]),
                                rational(raw["w"]), tuple(proc_time(x) for x in raw["p"])))
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise FormatError(f"jobs[{pos}]: {exc!r}") from None
        return Instance(int(data["machines"]), rational(data["epsilon"]), tuple(jobs))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad instance document: {exc!r}") from None


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormatError("instance document must be a JSON object")
    return instance_from_dict(data)


def dumps_instance(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


def _opt(x):
    return None if x is None else int(x)


def outcome_to_dict(out: Outcome) -> dict:
    return {
        "policy": out.policy,
        "admissions": [{"job": a.job, "machine": a.machine, "admit": fmt(a.admit),
                        "virtual_deadline": fmt(a.virtual_deadline), "parent": a.parent,
                        "branch": a.branch} for a in out.admissions],
        "segments": [{"machine": s.machine, "job": s.job, "start": fmt(s.start),
                      "end": fmt(s.end)} for s in out.segments],
        "finished": sorted(out.finished),
        "discarded": sorted(out.discarded),
        "never_admitted": sorted(out.never_admitted),
        "closed": [{"job": j, "time": fmt(t)} for j, t in out.closed],
        "weights": {"admitted": fmt(out.admitted_weight), "finished": fmt(out.finished_weight),
                    "discarded": fmt(out.discarded_weight)},
    }


def outcome_from_dict(data: dict) -> Outcome:
    try:
        w = data["weights"]
        return Outcome(
            policy=data["policy"],
            admissions=tuple(AdmissionRecord(int(a["job"]), int(a["machine"]), rational(a["admit"]),
                                             rational(a["virtual_deadline"]), _opt(a["parent"]),
                                             a.get("branch"))
                             for a in data["admissions"]),
            segments=tuple(ScheduleSegment(int(s["machine"]), int(s["job"]), rational(s["start"]),
                                           rational(s["end"])) for s in data["segments"]),
            finished=frozenset(data["finished"]),
            discarded=frozenset(data["discarded"]),
            never_admitted=frozenset(data["never_admitted"]),
            closed=tuple((int(c["job"]), rational(c["time"])) for c in data["closed"]),
            admitted_weight=rational(w["admitted"]),
            finished_weight=rational(w["finished"]),
            discarded_weight=rational(w["discarded"]),
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad outcome document: {exc!r}") from None


def dumps_outcome(out: Outcome) -> str:
    return dumps(outcome_to_dict(out))


def loads_outcome(text: str) -> Outcome:
    return outcome_from_dict(json.loads(text))


def trace_csv(out: Outcome) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["machine", "job", "start", "end"])
    for s in out.segments:
        writer.writerow([s.machine, s.job, fmt(s.start), fmt(s.end)])
    return buf.getvalue()


def parse_trace_csv(text: str) -> list[ScheduleSegment]:
    rows = csv.DictReader(io.StringIO(text))
    return [ScheduleSegment(int(r["machine"]), int(r["job"]), rational(r["start"]),
                            rational(r["end"])) for r in rows]


def oracle_to_dict(res: OracleResult) -> dict:
    return {"optimum": fmt(res.optimum),
            "assignment": {str(j): i for j, i in res.assignment}}

