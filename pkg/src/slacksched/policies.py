"""Admission policies and the per-invocation admission routine."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .core import Instance, Job, NotEligible, RationalLike, clamp_epsilon, density, rational


@dataclass(frozen=True)
class Decision:
    """Outcome of weighing one candidate against a machine's running job.

    ``branch`` names the rule that fired: ``"empty"`` for an idle machine,
    ``"small"``/``"middle"``/``"large"`` for the two-threshold cases and
    ``"ratio"`` for the single-threshold rule.
    """

    admit: bool
    branch: Optional[str] = None
    job: Optional[int] = None
    machine: Optional[int] = None
    parent: Optional[int] = None


REJECT = Decision(False)

# (p, rho, w) of a job on one machine
Stats = tuple[Fraction, Fraction, Fraction]


def two_threshold_decide(candidate: Stats, running: Optional[Stats], eps: Fraction) -> Decision:
    if running is None:
        return Decision(True, "empty")
    p_new, rho_new, w_new = candidate
    p_run, rho_run, w_run = running
    half = eps / 2
    if p_new <= half * p_run and rho_new >= (8 / eps) * rho_run:
        return Decision(True, "small")
    if half * p_run < p_new <= p_run and w_new >= 4 * w_run:
        return Decision(True, "middle")
    if p_new > p_run and rho_new >= 4 * rho_run:
        return Decision(True, "large")
    return REJECT


def single_threshold_decide(candidate: tuple[Fraction, Fraction],
                            running: Optional[tuple[Fraction, Fraction]],
                            gamma: Fraction) -> Decision:
    # sizes are carried for signature symmetry; this rule looks at densities only
    if running is None:
        return Decision(True, "empty")
    if candidate[1] * gamma >= running[1]:
        return Decision(True, "ratio")
    return REJECT


@dataclass(frozen=True)
class TwoThreshold:
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", clamp_epsilon(self.epsilon))

    @property
    def name(self) -> str:
        return "two-threshold"

    def decide(self, candidate: Stats, running: Optional[Stats]) -> Decision:
        return two_threshold_decide(candidate, running, self.epsilon)


@dataclass(frozen=True)
class SingleThreshold:
    """Baseline that preempts whenever density grows by a factor of at least 1/gamma.

    Virtual deadlines and the admission window use the same ``epsilon`` as
    the two-threshold policy so that the two differ only in ``decide``.
    """

    gamma: Fraction
    epsilon: Fraction = Fraction(1)

    def __post_init__(self):
        gamma = rational(self.gamma)
        if not 0 < gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "epsilon", clamp_epsilon(self.epsilon))

    @property
    def name(self) -> str:
        return f"single-threshold:{self.gamma}"

    def decide(self, candidate: Stats, running: Optional[Stats]) -> Decision:
        run = None if running is None else running[:2]
        return single_threshold_decide(candidate[:2], run, self.gamma)


AdmissionPolicy = Union[TwoThreshold, SingleThreshold]


def parse_policy(text: str, epsilon: RationalLike) -> AdmissionPolicy:
    """Build a policy from ``two-threshold`` or ``single-threshold:<gamma>``."""
    name, _, arg = text.strip().partition(":")
    if name == "two-threshold" and not arg:
        return TwoThreshold(rational(epsilon))
    if name == "single-threshold" and arg:
        return SingleThreshold(rational(arg), rational(epsilon))
    raise ValueError(f"unknown policy spec {text!r}; "
                     "expected 'two-threshold' or 'single-threshold:<gamma>'")


def for_instance(policy: AdmissionPolicy, inst: Instance) -> AdmissionPolicy:
    """Rebind a policy's slack to the instance's epsilon."""
    if isinstance(policy, TwoThreshold):
        return TwoThreshold(inst.epsilon)
    return SingleThreshold(policy.gamma, inst.epsilon)


def eligible_now(job: Job, machine: int, tau: Fraction, eps: Fraction) -> bool:
    p = job.p[machine]
    if p == float("inf"):
        raise NotEligible(f"job {job.id} is not eligible on machine {machine}")
    return job.r <= tau and job.d - tau >= (1 + eps / 2) * p


def stats(job: Job, machine: int) -> Stats:
    return job.p[machine], density(job, machine), job.w


def _top(inst: Instance, machine: int, ids) -> Optional[int]:
    best = None
    for k in ids:
        key = (-density(inst.job(k), machine), k)
        if best is None or key < best[0]:
            best = (key, k)
    return None if best is None else best[1]


def admission_routine(inst: Instance, pending: Sequence[int],
                      active: Mapping[int, Sequence[int]], tau: Fraction,
                      policy: AdmissionPolicy) -> list[Decision]:
    """Run one invocation of the admission loop over all machines.

    ``pending`` holds released, never-admitted job ids and ``active`` maps each
    machine to its currently active job ids.  Returns every decision taken, in
    order; admitted decisions carry the machine and parent.  Inputs are not
    modified.
    """
    eps = policy.epsilon
    pool = set(pending)
    decisions: list[Decision] = []
    for i in range(inst.machines):
        current = list(active.get(i, ()))
        running = _top(inst, i, current)
        considered: set[int] = set()
        while True:
            cands = [k for k in pool if k not in considered
                     and inst.job(k).eligible(i) and eligible_now(inst.job(k), i, tau, eps)]
            if not cands:
                break
            star = _top(inst, i, cands)
            considered.add(star)
            job = inst.job(star)
            run_stats = None if running is None else stats(inst.job(running), i)
            d = policy.decide(stats(job, i), run_stats)
            if d.admit:
                decisions.append(Decision(True, d.branch, star, i, running))
                pool.discard(star)
                current.append(star)
                running = _top(inst, i, current)
            else:
                decisions.append(Decision(False, None, star, i))
    return decisions
