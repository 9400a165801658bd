"""Budgeted maximum coverage.

Two modes:

* ``"ratio"`` -- the fast greedy that repeatedly adds the affordable set with
  the best (new elements)/(cost) ratio, and falls back to the best single
  affordable set when that beats the greedy run.
* ``"enum3"`` -- classic partial enumeration over every seed family of at
  most three sets followed by ratio-greedy completion, which restores the
  full 1 - 1/e guarantee at an O(k^3) multiplicative cost.

``mode=None`` selects ``"enum3"`` for k <= 40 and ``"ratio"`` otherwise.
Among equal ratios the lowest set index wins, so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence, Tuple

from .core import as_fraction
from .errors import DomainError

RATIO = "ratio"
PARTIAL_ENUM3 = "enum3"

PARTIAL_ENUM_MAX_K = 40


@dataclass(frozen=True)
class MaxCovResult:
    chosen: Tuple[int, ...]
    total_cost: Fraction
    covered: int


def _greedy_fill(members, costs, budget, chosen, covered, spent):
    """Extend ``chosen`` ratio-greedily; mutates nothing, returns new state."""
    chosen = list(chosen)
    covered = set(covered)
    spent = spent
    in_solution = set(chosen)
    while True:
        best = None  # (gain, cost, index)
        for i, mem in enumerate(members):
            if i in in_solution or costs[i] > budget - spent:
                continue
            gain = len(mem - covered)
            if gain == 0:
                continue
            if best is None or gain * best[1] > best[0] * costs[i]:
                best = (gain, costs[i], i)
        if best is None:
            break
        _, cost, i = best
        chosen.append(i)
        in_solution.add(i)
        covered |= members[i]
        spent += cost
    return chosen, covered, spent


def budgeted_max_coverage(
    universe_restrict: Iterable[int],
    sets: Sequence[Iterable[int]],
    costs: Sequence,
    budget,
    mode: Optional[str] = None,
) -> MaxCovResult:
    """Pick sets of total cost <= budget maximizing coverage of the universe."""
    budget = as_fraction(budget)
    if budget < 0:
        raise DomainError("budget must be nonnegative")
    costs = [as_fraction(c) for c in costs]
    if any(c <= 0 for c in costs):
        raise DomainError("all costs must be positive")
    if len(costs) != len(sets):
        raise ValueError("need one cost per set")
    universe = frozenset(universe_restrict)
    members = [frozenset(s) & universe for s in sets]
    if mode is None:
        mode = PARTIAL_ENUM3 if len(sets) <= PARTIAL_ENUM_MAX_K else RATIO
    if mode not in (RATIO, PARTIAL_ENUM3):
        raise ValueError("unknown mode %r" % mode)

    if budget == 0 or not sets:
        return MaxCovResult((), Fraction(0), 0)

    if mode == RATIO:
        chosen, covered, spent = _greedy_fill(members, costs, budget, [], set(), Fraction(0))
        best_single = None
        for i, mem in enumerate(members):
            if costs[i] <= budget and (best_single is None or len(mem) > best_single[0]):
                best_single = (len(mem), i)
        if best_single is not None and best_single[0] > len(covered):
            i = best_single[1]
            return MaxCovResult((i,), costs[i], best_single[0])
        return MaxCovResult(tuple(sorted(chosen)), spent, len(covered))

    # Partial enumeration: every affordable seed of size <= 3, greedily completed.
    best = None  # key: (-covered, total_cost, chosen tuple)
    k = len(sets)
    for size in range(0, 4):
        for seed in combinations(range(k), size):
            seed_cost = sum((costs[i] for i in seed), Fraction(0))
            if seed_cost > budget:
                continue
            seed_cover = set()
            for i in seed:
                seed_cover |= members[i]
            chosen, covered, spent = _greedy_fill(
                members, costs, budget, list(seed), seed_cover, seed_cost
            )
            key = (-len(covered), spent, tuple(sorted(chosen)))
            if best is None or key < best:
                best = key
    covered_count = -best[0]
    return MaxCovResult(best[2], best[1], covered_count)
