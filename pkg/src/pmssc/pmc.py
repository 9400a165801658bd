"""Parallel maximum coverage via LP relaxation plus randomized rounding.

Two parameter regimes share the rounding loop:

* poly -- budget-violation factor 1 + delta with
  delta = 4 ln m / ln ln m (clamped, see ``poly_delta``) and
  R = ceil((2 - 2/e) / eps^2 * ln n) rounding repetitions.
* fpt  -- delta = mu, with the repetition count raised to
  max(R, ceil(ln m / -ln(1 - (1 - f(mu))^m))), f(x) = e^x / (1+x)^(1+x).

Every returned assignment satisfies cost_j <= (1 + delta) * B_j on every
machine: iterations violating any budget are discarded, and the kept
iteration covering the most elements wins (ties to the lowest iteration
index). Iteration r draws from the random stream (seed, r), so runs are
reproducible and iterations independent.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .core import (
    Assignment,
    ProblemInstance,
    as_fraction,
    is_finite_cost,
)
from .errors import DomainError, NoIterationKeptError
from .lp import OPTIMAL, LinearProgram, LpSolution, solve_lp, to_lp_format
from .rng import stream

POLY = "poly"
FPT = "fpt"


def poly_delta(m: int) -> float:
    """Clamped 4 ln m / ln ln m: evaluated at max(m, 16) and floored at 1.

    For m <= 15 the raw formula is undefined or wild (ln ln m <= 1), so small
    machine counts borrow the m = 16 value.
    """
    mp = max(m, 16)
    return max(4.0 * math.log(mp) / math.log(math.log(mp)), 1.0)


def concentration_repetitions(n: int, epsilon: float) -> int:
    """ceil((2 - 2/e) / eps^2 * ln n), at least 1."""
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    if n < 1:
        raise DomainError("universe must be nonempty")
    return max(1, math.ceil((2.0 - 2.0 / math.e) / epsilon**2 * math.log(n)))


def fpt_budget_failure_rate(mu: float) -> float:
    """f(mu) = e^mu / (1 + mu)^(1 + mu): per-machine budget overflow bound."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    return math.exp(mu - (1.0 + mu) * math.log1p(mu))


def fpt_repetitions(m: int, mu: float, n: int, epsilon: float) -> float:
    """FPT repetition count; may be astronomically large (handled by r_cap)."""
    r1 = concentration_repetitions(n, epsilon)
    f = fpt_budget_failure_rate(mu)
    all_within = (1.0 - f) ** m
    if all_within <= 0.0:
        return math.inf
    fail = 1.0 - all_within
    if fail <= 0.0:
        return float(r1)
    denom = -math.log(fail)
    if denom <= 0.0:
        return math.inf
    r2 = math.log(m) / denom if m > 1 else 0.0
    return float(max(r1, math.ceil(r2)))


@dataclass(frozen=True)
class PmcParams:
    mode: str = POLY
    epsilon: float = 0.2
    mu: Optional[float] = None
    r_cap: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (POLY, FPT):
            raise DomainError("mode must be 'poly' or 'fpt'")
        if self.mode == FPT and self.mu is None:
            raise DomainError("fpt mode requires mu")

    def delta(self, m: int) -> float:
        if self.mode == POLY:
            return poly_delta(m)
        return float(self.mu)

    def repetitions(self, m: int, n: int) -> float:
        if self.mode == POLY:
            return float(concentration_repetitions(n, self.epsilon))
        return fpt_repetitions(m, self.mu, n, self.epsilon)

    def attempts(self, m: int, n: int) -> int:
        """Rounding iterations actually run: min(R, r_cap).

        The default cap is 10x the concentration term, which keeps FPT runs
        finite when the formula's repetition count explodes for small mu.
        """
        cap = self.r_cap
        if cap is None:
            cap = 10 * concentration_repetitions(n, self.epsilon)
        return int(min(self.repetitions(m, n), cap))


@dataclass(frozen=True)
class PmcResult:
    assignment: Assignment
    per_machine_cost: Tuple[Fraction, ...]
    covered: int
    lp_objective: float
    iterations_kept: int
    attempts: int


def raw_draws(seed: int, iteration: int, probs: Sequence[float]):
    """Independent Bernoulli draws for one rounding iteration.

    Pair (s, j) is included with probability probs[s*m + j]; the stream is
    keyed by (seed, iteration) so iterations are reproducible in isolation.
    """
    import numpy as np

    rng = stream(seed, iteration)
    return rng.random(len(probs)) < np.asarray(probs, dtype=float)


def _normalizers(inst: ProblemInstance) -> Tuple[Fraction, ...]:
    norms = []
    for j in range(inst.m):
        total = Fraction(0)
        for s in range(inst.k):
            c = inst.cost(s, j)
            if is_finite_cost(c):
                total += c
        norms.append(max(Fraction(1), total))
    return tuple(norms)


def build_pmc_lp(inst: ProblemInstance, budgets: Sequence) -> LinearProgram:
    """LP relaxation: maximize sum y_u subject to coverage and budget rows.

    Variable order is x_{s,j} at index s*m + j followed by y_u at k*m + u.
    Costs and budgets are pre-normalized per machine so each machine's total
    finite cost is at most 1 (budgets above the total are clamped, which is
    loss-free); infinite-cost pairs get a frozen [0, 0] bound.
    """
    k, m, n = inst.k, inst.m, inst.n
    budgets = [as_fraction(b) for b in budgets]
    if len(budgets) != m:
        raise ValueError("need one budget per machine")
    if any(b < 0 for b in budgets):
        raise DomainError("budgets must be nonnegative")
    norms = _normalizers(inst)

    nx = k * m
    objective = tuple([Fraction(0)] * nx + [Fraction(1)] * n)
    bounds = []
    for s in range(k):
        for j in range(m):
            if is_finite_cost(inst.cost(s, j)):
                bounds.append((Fraction(0), Fraction(1)))
            else:
                bounds.append((Fraction(0), Fraction(0)))
    bounds.extend((Fraction(0), Fraction(1)) for _ in range(n))

    constraints = []
    for u in range(n):
        coeffs = [Fraction(0)] * (nx + n)
        for s in range(k):
            if u in inst.members[s]:
                for j in range(m):
                    coeffs[s * m + j] = Fraction(1)
        coeffs[nx + u] = Fraction(-1)
        constraints.append((tuple(coeffs), ">=", Fraction(0)))
    for j in range(m):
        coeffs = [Fraction(0)] * (nx + n)
        for s in range(k):
            c = inst.cost(s, j)
            if is_finite_cost(c):
                coeffs[s * m + j] = c / norms[j]
        scaled = min(budgets[j] / norms[j], Fraction(1))
        assert scaled <= 1
        constraints.append((tuple(coeffs), "<=", scaled))

    return LinearProgram(objective, tuple(constraints), tuple(bounds))


def round_pmc(
    inst: ProblemInstance,
    budgets: Sequence,
    lp_solution: LpSolution,
    params: PmcParams,
) -> PmcResult:
    """Randomized rounding of the LP solution.

    Each iteration draws set-machine pairs independently with probability
    x_{s,j}; a set drawn on several machines is kept on the lowest-index one
    (the assignment type forbids duplicates, and dropping copies only lowers
    cost). Iterations whose realized cost exceeds (1 + delta) * B_j on any
    machine are discarded.
    """
    if lp_solution.status != OPTIMAL:
        raise DomainError("rounding requires an optimal LP solution")
    k, m = inst.k, inst.m
    budgets = [as_fraction(b) for b in budgets]
    probs = [min(1.0, max(0.0, float(v))) for v in lp_solution.values[: k * m]]
    delta = params.delta(m)
    limit = [(1 + Fraction(delta)) * b for b in budgets]
    costs = [[inst.cost(s, j) for j in range(m)] for s in range(k)]
    masks = []
    for s in range(k):
        mask = 0
        for u in inst.members[s]:
            mask |= 1 << u
        masks.append(mask)

    attempts = params.attempts(m, inst.n)
    best = None  # (covered, iteration, per-machine tuple of set lists)
    kept = 0
    for r in range(attempts):
        drawn = raw_draws(params.seed, r, probs)
        per_machine = [[] for _ in range(m)]
        loads = [Fraction(0)] * m
        for s in range(k):
            for j in range(m):
                if drawn[s * m + j]:
                    per_machine[j].append(s)
                    loads[j] += costs[s][j]
                    break  # a duplicate draw keeps only the lowest machine
        ok = True
        for j in range(m):
            if loads[j] > limit[j]:
                ok = False
                break
        if not ok:
            continue
        kept += 1
        union = 0
        for j in range(m):
            for s in per_machine[j]:
                union |= masks[s]
        covered = union.bit_count()
        if best is None or covered > best[0]:
            best = (covered, r, tuple(tuple(seq) for seq in per_machine))
    if best is None:
        raise NoIterationKeptError(attempts)
    assignment = Assignment(best[2])
    per_cost = []
    for j, seq in enumerate(assignment.per_machine):
        per_cost.append(sum((costs[s][j] for s in seq), Fraction(0)))
    return PmcResult(
        assignment=assignment,
        per_machine_cost=tuple(per_cost),
        covered=best[0],
        lp_objective=float(lp_solution.objective_value),
        iterations_kept=kept,
        attempts=attempts,
    )


def pmc_solve(
    inst: ProblemInstance,
    budgets: Sequence,
    params: PmcParams,
    verify_lp: bool = False,
) -> PmcResult:
    """build_pmc_lp -> solve_lp -> round_pmc, with the zero-objective shortcut."""
    program = build_pmc_lp(inst, budgets)
    dump = os.environ.get("PMSSC_DUMP_LP")
    if dump:
        with open(dump, "a", encoding="utf-8") as fh:
            fh.write(to_lp_format(program))
    solution = solve_lp(program, verify=verify_lp)
    if solution.status != OPTIMAL:
        raise DomainError("PMC relaxation must be feasible and bounded")
    if float(solution.objective_value) <= 1e-12:
        return PmcResult(
            assignment=Assignment.empty(inst.m),
            per_machine_cost=tuple(Fraction(0) for _ in range(inst.m)),
            covered=0,
            lp_objective=float(solution.objective_value),
            iterations_kept=0,
            attempts=0,
        )
    return round_pmc(inst, budgets, solution, params)
