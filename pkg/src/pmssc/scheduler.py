"""Greedy min-sum set cover driver.

Repeatedly asks a densest-subfamily oracle for an assignment against the
still-uncovered elements and appends it to the schedule; any oracle with
density guarantee alpha turns this into a 4/alpha approximation.

Bookkeeping notes:

* sets handed out by the oracle that cover nothing new are dropped before
  appending (harmless for the bound, strictly better realized cost);
* within one iteration each machine's batch is reordered by marginal
  coverage per cost, which the bound also tolerates;
* machines run without synchronization barriers: appended work starts at
  each machine's own current end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

from .core import (
    Assignment,
    ProblemInstance,
    Schedule,
    validate_instance,
)
from .errors import StalledOracleError, UncoverableError
from .oracle import OracleLimits, exact_pds
from .pds import pds_identical, pds_related, pds_unit, pds_unrelated
from .rng import child_seed

ORACLE_NAMES = ("identical", "unit", "related", "unrelated", "exact")


@dataclass(frozen=True)
class GreedyIteration:
    assignment: Assignment
    makespan: Fraction
    newly_covered: frozenset
    remaining_before: int


@dataclass(frozen=True)
class GreedyTrace:
    iterations: Tuple[GreedyIteration, ...]


def upper_bound_from_trace(trace: GreedyTrace) -> Fraction:
    """Sum over iterations of |remaining| * makespan: the proof's cost bound."""
    return sum(
        (Fraction(it.remaining_before) * it.makespan for it in trace.iterations),
        Fraction(0),
    )


def _make_oracle(
    inst: ProblemInstance,
    oracle: Union[str, Callable],
    epsilon: float,
    seed: int,
    maxcov_mode: Optional[str],
    limits: Optional[OracleLimits],
) -> Callable:
    if callable(oracle):
        return oracle
    if oracle == "identical":
        return lambda remaining, available, iteration: pds_identical(
            inst, remaining, epsilon, available=available, maxcov_mode=maxcov_mode
        )
    if oracle == "unit":
        return lambda remaining, available, iteration: pds_unit(
            inst, remaining, epsilon, available=available, maxcov_mode=maxcov_mode
        )
    if oracle == "related":
        return lambda remaining, available, iteration: pds_related(
            inst, remaining, epsilon, available=available,
            seed=child_seed(seed, iteration),
        )
    if oracle == "unrelated":
        return lambda remaining, available, iteration: pds_unrelated(
            inst, remaining, epsilon, available=available,
            seed=child_seed(seed, iteration),
        )
    if oracle == "exact":
        return lambda remaining, available, iteration: exact_pds(
            inst, remaining, limits, available=available
        )[0]
    raise ValueError("unknown oracle %r" % oracle)


def _order_batch(inst, j, sets_on_machine, remaining):
    """Greedy marginal-coverage-per-cost order within one machine's batch."""
    pending = list(sets_on_machine)
    covered = set()
    ordered = []
    while pending:
        best = None
        for s in pending:
            gain = len((inst.members[s] & remaining) - covered)
            cost = inst.cost(s, j)
            if best is None or gain * best[1] > best[0] * cost:
                best = (gain, cost, s)
        _, _, s = best
        pending.remove(s)
        ordered.append(s)
        covered |= inst.members[s] & remaining
    return ordered


def pmssc_greedy(
    inst: ProblemInstance,
    oracle: Union[str, Callable] = "identical",
    epsilon: float = 0.1,
    seed: int = 0,
    maxcov_mode: Optional[str] = None,
    limits: Optional[OracleLimits] = None,
) -> Tuple[Schedule, GreedyTrace]:
    """Greedy scheme: cover the universe by repeated densest-subfamily calls."""
    report = validate_instance(inst)
    if not report.coverable:
        raise UncoverableError(
            "elements %s cannot be covered" % list(report.uncovered_elements)
        )
    oracle_fn = _make_oracle(inst, oracle, epsilon, seed, maxcov_mode, limits)

    remaining = frozenset(range(inst.n))
    available = set(range(inst.k))
    machines = [[] for _ in range(inst.m)]
    iterations = []
    step = 0
    while remaining:
        if step > inst.n:
            raise StalledOracleError("greedy failed to make progress")
        asg = oracle_fn(remaining=remaining, available=frozenset(available), iteration=step)
        kept = []
        for j, seq in enumerate(asg.per_machine):
            useful = [s for s in seq if inst.members[s] & remaining]
            kept.append(_order_batch(inst, j, useful, remaining))
        newly = frozenset()
        for seq in kept:
            for s in seq:
                newly |= inst.members[s] & remaining
        if not newly:
            raise StalledOracleError("oracle assignment covers no remaining element")
        makespan = Fraction(0)
        for j, seq in enumerate(kept):
            machines[j].extend(seq)
            load = sum((inst.cost(s, j) for s in seq), Fraction(0))
            makespan = max(makespan, load)
        iterations.append(
            GreedyIteration(
                assignment=Assignment(tuple(tuple(seq) for seq in kept)),
                makespan=makespan,
                newly_covered=newly,
                remaining_before=len(remaining),
            )
        )
        remaining -= newly
        for seq in asg.per_machine:
            available.difference_update(seq)
        step += 1
    schedule = Schedule(tuple(tuple(seq) for seq in machines))
    return schedule, GreedyTrace(tuple(iterations))
