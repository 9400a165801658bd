from fractions import Fraction
from itertools import combinations

import pytest

from pmssc.errors import DomainError
from pmssc.fileio import generate_instance
from pmssc.maxcov import PARTIAL_ENUM3, RATIO, budgeted_max_coverage


def brute_force_opt(universe, sets, costs, budget):
    """Independent oracle: enumerate every subset within budget."""
    universe = frozenset(universe)
    best = 0
    for r in range(len(sets) + 1):
        for combo in combinations(range(len(sets)), r):
            if sum(costs[i] for i in combo) > budget:
                continue
            covered = set()
            for i in combo:
                covered |= frozenset(sets[i]) & universe
            best = max(best, len(covered))
    return best


T1_SETS = [{0, 1}, {2}, {0, 1, 2}]
T1_COSTS = [Fraction(1), Fraction(1), Fraction(2)]


def test_t1_budget_two_ratio():
    # exhaustive check: optimum at budget 2 is 3
    assert brute_force_opt({0, 1, 2}, T1_SETS, T1_COSTS, 2) == 3
    result = budgeted_max_coverage({0, 1, 2}, T1_SETS, T1_COSTS, 2, mode=RATIO)
    assert result.covered == 3
    assert result.chosen == (0, 1)  # picks A then B
    assert result.total_cost == 2


def test_budget_zero_returns_empty():
    result = budgeted_max_coverage({0, 1}, [{0}, {1}], [1, 1], 0, mode=RATIO)
    assert result.chosen == () and result.covered == 0


def test_singleton_fallback_value():
    sets = [{0}, {1}, {0, 1, 2, 3}]
    costs = [Fraction(1), Fraction(1), Fraction(3)]
    assert brute_force_opt(range(4), sets, costs, 3) == 4
    result = budgeted_max_coverage(range(4), sets, costs, 3, mode=RATIO)
    assert result.covered == 4
    assert result.total_cost <= 3


def test_budget_is_hard_constraint():
    for seed in range(40):
        inst = generate_instance(n=7, k=5, m=1, model="identical", density=0.4, seed=seed)
        costs = [inst.cost(s, 0) for s in range(inst.k)]
        budget = Fraction(1 + seed % 5)
        for mode in (RATIO, PARTIAL_ENUM3):
            result = budgeted_max_coverage(
                range(inst.n), inst.sets, costs, budget, mode=mode
            )
            assert result.total_cost <= budget


def test_partial_enum_dominates_ratio():
    for seed in range(40):
        inst = generate_instance(n=8, k=6, m=1, model="identical", density=0.35, seed=100 + seed)
        costs = [inst.cost(s, 0) for s in range(inst.k)]
        budget = Fraction(2 + seed % 6)
        ratio = budgeted_max_coverage(range(inst.n), inst.sets, costs, budget, mode=RATIO)
        enum3 = budgeted_max_coverage(
            range(inst.n), inst.sets, costs, budget, mode=PARTIAL_ENUM3
        )
        assert enum3.covered >= ratio.covered


def test_partial_enum_reaches_1_minus_1_over_e():
    import math

    factor = 1 - 1 / math.e
    for seed in range(30):
        k = 6 if seed < 20 else 10
        inst = generate_instance(n=8, k=k, m=1, model="identical", density=0.35, seed=200 + seed)
        costs = [inst.cost(s, 0) for s in range(inst.k)]
        budget = Fraction(2 + seed % 5)
        opt = brute_force_opt(range(inst.n), inst.sets, costs, budget)
        enum3 = budgeted_max_coverage(
            range(inst.n), inst.sets, costs, budget, mode=PARTIAL_ENUM3
        )
        assert enum3.covered >= factor * opt - 1e-9


def test_default_mode_matches_enum_for_small_k():
    result = budgeted_max_coverage({0, 1, 2}, T1_SETS, T1_COSTS, 2, mode=None)
    enum3 = budgeted_max_coverage({0, 1, 2}, T1_SETS, T1_COSTS, 2, mode=PARTIAL_ENUM3)
    assert result == enum3


def test_nonpositive_cost_rejected():
    with pytest.raises(DomainError):
        budgeted_max_coverage({0}, [{0}], [0], 1)
    with pytest.raises(DomainError):
        budgeted_max_coverage({0}, [{0}], [1], -1)
