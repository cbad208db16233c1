"""Exact simulator for online weighted throughput scheduling with slack."""

from .core import (INF, BadSlack, Instance, InvalidInstance, Job, NotEligible, SchedError,
                   ValidationReport, Violation, clamp_epsilon, density, rational,
                   validate_instance)
from .engine import (AdmissionRecord, InvariantViolation, Outcome, ScheduleSegment, simulate,
                     weight_totals)
from .generators import BadSpec, RandomSpec, gen_example1, gen_example2, gen_random
from .oracle import (OracleResult, TooLarge, Unbounded, competitive_ratio, edf_feasible,
                     optimal_nonmigratory)
from .policies import (Decision, SingleThreshold, TwoThreshold, admission_routine,
                       eligible_now, parse_policy, single_threshold_decide, two_threshold_decide)
from .verify import check_admissions, check_feasibility

__version__ = "0.1.0"
