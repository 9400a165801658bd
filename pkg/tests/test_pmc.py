import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import t1_instance
from pmssc.core import (
    IdenticalCosts,
    INFINITE_COST,
    ProblemInstance,
    UnrelatedCosts,
)
from pmssc.errors import NoIterationKeptError
from pmssc.fileio import generate_instance
from pmssc.lp import OPTIMAL, LpSolution, solve_lp
from pmssc.pmc import (
    FPT,
    POLY,
    PmcParams,
    build_pmc_lp,
    concentration_repetitions,
    fpt_budget_failure_rate,
    fpt_repetitions,
    pmc_solve,
    poly_delta,
    raw_draws,
    round_pmc,
)

U3 = frozenset(range(3))


def test_lp_dimensions_t1():
    inst = t1_instance(m=1)
    lp = build_pmc_lp(inst, [2])
    assert len(lp.objective) == 3 + 3  # three x vars, three y vars
    assert len(lp.constraints) == 3 + 1  # coverage rows plus one budget row


def test_lp_dimensions_single_set_two_machines():
    inst = ProblemInstance(
        n=1, sets=((0,),), m=2, cost_model=IdenticalCosts((Fraction(1),))
    )
    lp = build_pmc_lp(inst, [1, 1])
    assert len(lp.objective) == 2 + 1
    assert len(lp.constraints) == 1 + 2


def test_infinite_cost_pair_frozen_to_zero():
    inst = ProblemInstance(
        n=2,
        sets=((0,), (1,)),
        m=2,
        cost_model=UnrelatedCosts(
            ((Fraction(1), INFINITE_COST), (INFINITE_COST, Fraction(1)))
        ),
    )
    lp = build_pmc_lp(inst, [1, 1])
    # x_{0,1} and x_{1,0} are pinned to zero
    assert lp.bounds[0 * 2 + 1] == (Fraction(0), Fraction(0))
    assert lp.bounds[1 * 2 + 0] == (Fraction(0), Fraction(0))
    result = pmc_solve(inst, [1, 1], PmcParams(mode=POLY, epsilon=0.2, seed=1))
    assert result.covered == 2
    assert result.assignment.per_machine == ((0,), (1,))


def test_integral_lp_rounds_exactly():
    inst = t1_instance(m=1)
    lp = build_pmc_lp(inst, [2])
    sol = solve_lp(lp, verify=True)
    result = round_pmc(inst, [2], sol, PmcParams(mode=POLY, epsilon=0.2, seed=0))
    # the relaxation optimum is integral here, so one iteration reproduces it
    assert result.covered == 3
    assert float(sol.objective_value) == 3


def test_t1_poly_covered_three_across_seeds():
    inst = t1_instance(m=1)
    hits = 0
    for seed in range(100):
        result = pmc_solve(inst, [2], PmcParams(mode=POLY, epsilon=0.2, seed=seed))
        hits += result.covered == 3
    assert hits >= 99


def test_t1_two_machines_budget_one_each():
    inst = t1_instance(m=2)
    result = pmc_solve(inst, [1, 1], PmcParams(mode=POLY, epsilon=0.2, seed=7))
    assert result.covered == 3


def test_zero_budgets_give_empty_result():
    inst = t1_instance(m=2)
    result = pmc_solve(inst, [0, 0], PmcParams(mode=POLY, epsilon=0.2, seed=0))
    assert result.assignment.is_empty
    assert result.covered == 0 and result.iterations_kept == 0


def test_poly_delta_m100():
    assert abs(poly_delta(100) - 4 * math.log(100) / math.log(math.log(100))) < 1e-12
    assert abs(poly_delta(100) - 12.0619) < 1e-3


def test_poly_delta_clamped_for_small_m():
    for m in (1, 2, 5, 15):
        assert poly_delta(m) == poly_delta(16)
    assert poly_delta(16) >= 1.0


def test_fpt_term_m3_mu1():
    f = fpt_budget_failure_rate(1.0)
    assert abs(f - math.e / 4) < 1e-12
    term = math.log(3) / (-math.log(1 - (1 - math.e / 4) ** 3))
    assert math.ceil(term) == 33
    r = fpt_repetitions(3, 1.0, 8, 0.2)
    expected = max(
        math.ceil((2 - 2 / math.e) / 0.2**2 * math.log(8)), math.ceil(term)
    )
    assert r == expected


def test_fpt_repetitions_monotone_in_mu():
    values = [fpt_repetitions(4, mu, 16, 0.3) for mu in (0.08, 0.15, 0.3, 0.6, 1.0, 2.0)]
    for earlier, later in zip(values, values[1:]):
        assert later <= earlier


def test_default_attempts_cap():
    params = PmcParams(mode=FPT, epsilon=0.3, mu=0.01, seed=0)
    r1 = concentration_repetitions(16, 0.3)
    assert params.attempts(4, 16) == 10 * r1  # formula R is astronomically larger


def test_hard_budget_constraint_always_holds():
    for seed in range(30):
        inst = generate_instance(
            n=4 + seed % 5,
            k=3 + seed % 6,
            m=1 + seed % 3,
            model="unrelated" if seed % 2 else "identical",
            density=0.4,
            seed=700 + seed,
        )
        budgets = [Fraction(2 + (seed + j) % 3) for j in range(inst.m)]
        params = PmcParams(mode=POLY, epsilon=0.2, seed=seed)
        result = pmc_solve(inst, budgets, params)
        delta = Fraction(params.delta(inst.m))
        for j in range(inst.m):
            assert result.per_machine_cost[j] <= (1 + delta) * budgets[j]


def test_rounding_unbiasedness():
    """Raw per-pair inclusion frequency matches x within 3 sigma."""
    probs = [0.15, 0.5, 0.85, 0.0, 1.0, 0.3]
    trials = 100_000
    counts = np.zeros(len(probs))
    for r in range(trials):
        counts += raw_draws(123, r, probs)
    freq = counts / trials
    for p, f in zip(probs, freq):
        tol = 3 * math.sqrt(p * (1 - p) / trials)
        assert abs(f - p) <= tol + 1e-12


def test_coverage_expectation_lemma():
    """Mean single-iteration coverage is at least (1 - 1/e) * LP objective."""
    inst = generate_instance(n=8, k=6, m=2, model="identical", density=0.4, seed=31)
    budgets = [Fraction(2), Fraction(2)]
    sol = solve_lp(build_pmc_lp(inst, budgets), verify=True)
    probs = [min(1.0, max(0.0, float(v))) for v in sol.values[: inst.k * inst.m]]
    trials = 10_000
    covered = np.zeros(trials)
    for r in range(trials):
        drawn = raw_draws(9, r, probs)
        union = set()
        for s in range(inst.k):
            if any(drawn[s * inst.m + j] for j in range(inst.m)):
                union |= inst.members[s]
        covered[r] = len(union)
    mean = covered.mean()
    slack = 3 * covered.std() / math.sqrt(trials)
    assert mean >= (1 - 1 / math.e) * float(sol.objective_value) - slack


def test_no_iteration_kept_reported():
    inst = ProblemInstance(
        n=1, sets=((0,), (0,)), m=1, cost_model=IdenticalCosts((2, 2))
    )
    fake = LpSolution((0.5, 0.5, 1.0), 1.0, OPTIMAL)
    params = PmcParams(mode=FPT, epsilon=0.2, mu=0.001, r_cap=1, seed=9)
    with pytest.raises(NoIterationKeptError) as err:
        round_pmc(inst, [2], fake, params)
    assert err.value.attempts == 1


def test_determinism_same_seed():
    inst = generate_instance(n=7, k=6, m=2, model="identical", density=0.4, seed=55)
    params = PmcParams(mode=POLY, epsilon=0.2, seed=99)
    a = pmc_solve(inst, [2, 3], params)
    b = pmc_solve(inst, [2, 3], params)
    assert a == b


def test_lp_dump_debug_flag(tmp_path, monkeypatch):
    dump = tmp_path / "relaxation.lp"
    monkeypatch.setenv("PMSSC_DUMP_LP", str(dump))
    inst = t1_instance(m=1)
    pmc_solve(inst, [2], PmcParams(mode=POLY, epsilon=0.2, seed=0))
    text = dump.read_text()
    assert "Maximize" in text and "Subject To" in text
