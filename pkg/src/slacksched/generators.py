"""Adversarial and random instance generators."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import INF, Instance, Job, RationalLike, SchedError, rational


class BadSpec(SchedError):
    pass


def default_delta(eps: RationalLike, gamma: RationalLike) -> Fraction:
    eps, gamma = rational(eps), rational(gamma)
    return min(eps, gamma, eps * gamma) / 100


def _check_unit(name: str, value: Fraction) -> None:
    if not 0 < value <= 1:
        raise BadSpec(f"{name} must lie in (0, 1], got {value}")


def gen_example1(eps: RationalLike, gamma: RationalLike, delta: Optional[RationalLike] = None,
                 n: int = 1) -> Instance:
    """Chain of n+1 tight jobs, each shorter and denser than the one it lands on."""
    eps, gamma = rational(eps), rational(gamma)
    _check_unit("epsilon", eps)
    _check_unit("gamma", gamma)
    delta = default_delta(eps, gamma) if delta is None else rational(delta)
    if not 0 < delta < 1:
        raise BadSpec(f"delta must lie in (0, 1), got {delta}")
    if n < 0:
        raise BadSpec(f"n must be non-negative, got {n}")
    jobs = []
    r, p, rho = Fraction(0), Fraction(1), Fraction(1)
    for j in range(n + 1):
        if j:
            r += (1 - delta) * p
            p *= eps + delta
            rho *= (1 + delta) / gamma
        jobs.append(Job(j, r, r + (1 + eps) * p, rho * p, (p,)))
    return Instance(1, eps, tuple(jobs))


def gen_example2(eps: RationalLike, gamma: RationalLike,
                 delta: Optional[RationalLike] = None) -> Instance:
    """Two tight jobs: a short light one at 0 and a long heavy one right after."""
    eps, gamma = rational(eps), rational(gamma)
    _check_unit("epsilon", eps)
    _check_unit("gamma", gamma)
    delta = default_delta(eps, gamma) if delta is None else rational(delta)
    if delta <= 0:
        raise BadSpec(f"delta must be positive, got {delta}")
    if delta >= eps * gamma:
        raise BadSpec(f"delta={delta} must be below eps*gamma={eps * gamma}")
    p1, p2 = Fraction(2), 1 / eps
    jobs = (
        Job(0, Fraction(0), (1 + eps) * p1, Fraction(2), (p1,)),
        Job(1, delta, delta + (1 + eps) * p2, 1 / (eps * gamma - delta), (p2,)),
    )
    return Instance(1, eps, jobs)


@dataclass(frozen=True)
class RandomSpec:
    seed: int
    n: int
    m: int
    eps: Fraction
    size: tuple[Fraction, Fraction] = (Fraction(1), Fraction(8))
    weight: tuple[Fraction, Fraction] = (Fraction(1), Fraction(16))
    stretch: tuple[Fraction, Fraction] = (Fraction(1), Fraction(2))
    horizon: Fraction = Fraction(20)
    grid: int = 4  # values are drawn from steps of 1/grid within each range

    def check(self) -> None:
        if self.n < 0 or self.m < 1 or self.grid < 1:
            raise BadSpec(f"bad shape n={self.n}, m={self.m}, grid={self.grid}")
        if self.eps <= 0:
            raise BadSpec(f"epsilon must be positive, got {self.eps}")
        for name, (lo, hi) in (("size", self.size), ("weight", self.weight),
                               ("stretch", self.stretch)):
            if lo > hi or lo <= 0:
                raise BadSpec(f"{name} range [{lo}, {hi}] is empty or non-positive")
        if self.stretch[0] < 1:
            raise BadSpec("stretch must be at least 1")
        if self.horizon < 0:
            raise BadSpec("horizon must be non-negative")


def _draw(rng: random.Random, lo: Fraction, hi: Fraction, grid: int) -> Fraction:
    steps = grid * max(1, math.ceil(hi - lo))
    return lo + (hi - lo) * Fraction(rng.randint(0, steps), steps)


def gen_random(spec: RandomSpec) -> Instance:
    """Random instance whose deadlines satisfy the slack bound on every eligible machine."""
    spec.check()
    rng = random.Random(spec.seed)
    jobs = []
    for j in range(spec.n):
        eligible = [rng.random() < 0.5 for _ in range(spec.m)]
        if not any(eligible):
            eligible[rng.randrange(spec.m)] = True
        p = tuple(_draw(rng, *spec.size, spec.grid) if e else INF for e in eligible)
        w = _draw(rng, *spec.weight, spec.grid)
        r = _draw(rng, Fraction(0), spec.horizon, spec.grid)
        s = _draw(rng, *spec.stretch, spec.grid)
        longest = max(x for x in p if x != INF)
        jobs.append(Job(j, r, r + (1 + spec.eps) * longest * s, w, p))
    return Instance(spec.m, spec.eps, tuple(jobs))
