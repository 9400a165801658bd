"""Solvers for parallel min-sum set cover and its subproblems."""

from .core import (
    Assignment,
    DensityValue,
    IdenticalCosts,
    INFINITE_COST,
    ProblemInstance,
    RelatedCosts,
    Schedule,
    UnitCosts,
    UnrelatedCosts,
    coverage,
    density,
    evaluate_schedule_cost,
    validate_instance,
)
from .scheduler import pmssc_greedy, upper_bound_from_trace

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "DensityValue",
    "IdenticalCosts",
    "INFINITE_COST",
    "ProblemInstance",
    "RelatedCosts",
    "Schedule",
    "UnitCosts",
    "UnrelatedCosts",
    "coverage",
    "density",
    "evaluate_schedule_cost",
    "pmssc_greedy",
    "upper_bound_from_trace",
    "validate_instance",
    "__version__",
]
