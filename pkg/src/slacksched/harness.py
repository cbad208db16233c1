"""Ratio sweeps and the invariant suite behind the ``sweep`` and ``check`` commands."""

from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import Instance, fmt, validate_instance
from .engine import InvariantViolation, Outcome, simulate
from .generators import (RandomSpec, default_delta, gen_example1, gen_example2, gen_random)
from .oracle import TooLarge, Unbounded, optimal_nonmigratory, witness_feasible
from .policies import AdmissionPolicy, SingleThreshold, TwoThreshold
from .serialize import dumps_outcome, loads_outcome
from .verify import check_admissions, check_feasibility, theorem3_holds

SWEEP_COLUMNS = ["generator", "eps", "gamma", "delta", "n", "m", "seed", "policy",
                 "admitted", "finished", "optimum", "ratio", "margin"]


def competitive_bound(eps: Fraction) -> Fraction:
    """Explicit ratio bound for the two-threshold policy: 768/eps + 386."""
    eps = min(eps, Fraction(1))
    return 768 / eps + 386


@dataclass(frozen=True)
class SweepSpec:
    generator: str  # example1 | example2 | random
    eps_grid: tuple[Fraction, ...]
    policies: tuple[str, ...] = ("two-threshold", "single-threshold")
    gamma: Optional[Fraction] = None  # fixed gamma; otherwise gamma_scale * eps
    gamma_scale: Fraction = Fraction(1)
    delta: Optional[Fraction] = None
    n: int = 4
    m: int = 1
    seeds: tuple[int, ...] = (0,)
    oracle_cap: int = 12


def _gamma_for(spec: SweepSpec, eps: Fraction) -> Fraction:
    return spec.gamma if spec.gamma is not None else min(Fraction(1), spec.gamma_scale * eps)


def _policy(text: str, gamma: Fraction, eps: Fraction) -> AdmissionPolicy:
    if text == "two-threshold":
        return TwoThreshold(eps)
    if text == "single-threshold":
        return SingleThreshold(gamma, eps)
    if text.startswith("single-threshold:"):
        return SingleThreshold(Fraction(text.split(":", 1)[1]), eps)
    raise ValueError(f"unknown policy {text!r}")


def build_instance(spec: SweepSpec, eps: Fraction, seed: int) -> tuple[Instance, Fraction, Fraction]:
    gamma = _gamma_for(spec, eps)
    delta = spec.delta if spec.delta is not None else default_delta(eps, gamma)
    if spec.generator == "example1":
        return gen_example1(eps, gamma, delta, spec.n), gamma, delta
    if spec.generator == "example2":
        return gen_example2(eps, gamma, delta), gamma, delta
    if spec.generator == "random":
        return gen_random(RandomSpec(seed=seed, n=spec.n, m=spec.m, eps=eps)), gamma, delta
    raise ValueError(f"unknown generator {spec.generator!r}")


def _sweep_point(spec: SweepSpec, eps: Fraction, seed: int) -> list[dict]:
    inst, gamma, delta = build_instance(spec, eps, seed)
    try:
        opt = optimal_nonmigratory(inst, spec.oracle_cap).optimum
    except TooLarge:
        opt = None
    rows = []
    for text in spec.policies:
        pol = _policy(text, gamma, eps)
        out = simulate(inst, pol, strict=False)
        if opt is None:
            ratio = "too-large"
        elif out.finished_weight == 0:
            ratio = str(Unbounded) if opt > 0 else "undefined"
        else:
            ratio = fmt(opt / out.finished_weight)
        margin = out.margin
        rows.append({
            "generator": spec.generator, "eps": eps, "gamma": gamma, "delta": delta,
            "n": inst.n, "m": inst.machines, "seed": seed, "policy": pol.name,
            "admitted": fmt(out.admitted_weight), "finished": fmt(out.finished_weight),
            "optimum": "too-large" if opt is None else fmt(opt), "ratio": ratio,
            "margin": "" if margin is None else fmt(margin),
        })
    return rows


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """One row per (eps, seed, policy), sorted by (eps, gamma, seed, policy)."""
    seeds = spec.seeds if spec.generator == "random" else (0,)
    points = [(eps, seed) for eps in spec.eps_grid for seed in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_sweep_point, [spec] * len(points), *zip(*points)))
    else:
        chunks = [_sweep_point(spec, eps, seed) for eps, seed in points]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r["eps"], r["gamma"], r["seed"], r["policy"]))
    return rows


def sweep_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: fmt(v) if isinstance(v, Fraction) else v for k, v in row.items()})
    return buf.getvalue()


# -- invariant suite -------------------------------------------------------

INVARIANTS = (
    "generated-valid",
    "feasibility",
    "admission-fidelity",
    "finished-half-admitted",
    "determinism",
    "outcome-roundtrip",
    "oracle-dominance",
    "oracle-witness",
    "competitive-bound",
    "example1-chain",
)


@dataclass
class InvariantResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class CheckReport:
    results: dict[str, InvariantResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def lines(self) -> list[str]:
        out = []
        for r in self.results.values():
            status = "PASS" if r.passed else "FAIL"
            out.append(f"{status} {r.name} ({r.checked} checked)")
            out.extend(f"    {f}" for f in r.failures[:5])
        return out


def random_case(seed: int, max_n: int = 20) -> Instance:
    rng = random.Random(seed)
    eps = rng.choice((Fraction(1, 4), Fraction(1, 2), Fraction(1)))
    return gen_random(RandomSpec(seed=seed, n=rng.randint(1, max_n), m=rng.randint(1, 3), eps=eps))


def example_cases() -> list[tuple[str, Instance]]:
    cases = []
    for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        for gamma in (eps, 2 * eps, 4 * eps, Fraction(1)):
            if gamma > 1:
                continue
            delta = default_delta(eps, gamma)
            cases.append((f"example2 eps={eps} gamma={gamma}", gen_example2(eps, gamma, delta)))
            for n in range(9):
                cases.append((f"example1 eps={eps} gamma={gamma} n={n}",
                              gen_example1(eps, gamma, delta, n)))
    return cases


class _Suite:
    def __init__(self, oracle_n: int):
        self.oracle_n = oracle_n
        self.results = {name: InvariantResult(name) for name in INVARIANTS}

    def record(self, name: str, ok: bool, label: str, detail: str = "") -> None:
        res = self.results[name]
        res.checked += 1
        if not ok:
            res.failures.append(f"{label}: {detail}" if detail else label)

    def run_case(self, label: str, inst: Instance) -> None:
        report = validate_instance(inst)
        self.record("generated-valid", report.ok, label, "; ".join(map(str, report.violations)))
        if not report.ok:
            return
        gammas = sorted({Fraction(1, 2), min(Fraction(1), inst.epsilon)})
        policies = [TwoThreshold(inst.epsilon)] + [SingleThreshold(g, inst.epsilon) for g in gammas]
        outcomes: list[tuple[AdmissionPolicy, Outcome]] = []
        for pol in policies:
            try:
                out = simulate(inst, pol, strict=False)
            except InvariantViolation as exc:
                self.record("admission-fidelity", False, f"{label} [{pol.name}]", str(exc))
                continue
            outcomes.append((pol, out))
            tag = f"{label} [{pol.name}]"
            bad = check_feasibility(out, inst)
            self.record("feasibility", not bad, tag, "; ".join(map(str, bad[:3])))
            bad = check_admissions(out, inst, pol)
            self.record("admission-fidelity", not bad, tag, "; ".join(map(str, bad[:3])))
            self.record("determinism", simulate(inst, pol, strict=False) == out, tag)
            text = dumps_outcome(out)
            self.record("outcome-roundtrip", dumps_outcome(loads_outcome(text)) == text, tag)
            if isinstance(pol, TwoThreshold):
                self.record("finished-half-admitted", theorem3_holds(out), tag,
                            f"finished {out.finished_weight}, admitted {out.admitted_weight}")
        if inst.n > self.oracle_n or inst.machines > 3:
            return
        res = optimal_nonmigratory(inst, self.oracle_n)
        self.record("oracle-witness", witness_feasible(inst, res), label)
        for pol, out in outcomes:
            tag = f"{label} [{pol.name}]"
            self.record("oracle-dominance", res.optimum >= out.finished_weight, tag,
                        f"optimum {res.optimum} < finished {out.finished_weight}")
            if isinstance(pol, TwoThreshold) and res.optimum > 0:
                ok = out.finished_weight > 0 and \
                    res.optimum <= competitive_bound(inst.epsilon) * out.finished_weight
                self.record("competitive-bound", ok, tag,
                            f"optimum {res.optimum}, finished {out.finished_weight}")

    def example1_chain(self, eps: Fraction, gamma: Fraction, n: int) -> None:
        label = f"example1 eps={eps} gamma={gamma} n={n}"
        ok, detail = example1_chain_ok(eps, gamma, n)
        self.record("example1-chain", ok, label, detail)


def example1_chain_ok(eps: Fraction, gamma: Fraction, n: int,
                      delta: Optional[Fraction] = None) -> tuple[bool, str]:
    """Under single-threshold(gamma) every chain job preempts its predecessor on
    arrival and only the last one finishes."""
    inst = gen_example1(eps, gamma, delta, n)
    out = simulate(inst, SingleThreshold(gamma, eps))
    for a in out.admissions:
        job = inst.job(a.job)
        want_parent = a.job - 1 if a.job else None
        if a.admit != job.r or a.parent != want_parent:
            return False, f"job {a.job} admitted at {a.admit} with parent {a.parent}"
        if not any(s.job == a.job and s.start == job.r for s in out.segments):
            return False, f"job {a.job} did not start on arrival"
    if out.finished != {n} or len(out.admissions) != n + 1:
        return False, f"finished {sorted(out.finished)}"
    return True, ""


def run_check(seeds: int = 200, oracle_n: int = 8, max_n: int = 20,
              first_seed: int = 0) -> CheckReport:
    suite = _Suite(oracle_n)
    for seed in range(first_seed, first_seed + seeds):
        suite.run_case(f"seed {seed}", random_case(seed, max_n))
    for label, inst in example_cases():
        suite.run_case(label, inst)
    for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        for gamma in (2 * eps, 4 * eps):
            if gamma <= 1:
                for n in range(1, 9):
                    suite.example1_chain(eps, gamma, n)
    return CheckReport(suite.results)
