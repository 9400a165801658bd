import math

import pytest

from pmssc.bounds import (
    LOWER,
    UPPER,
    chernoff_lower,
    chernoff_upper,
    validate_bound_monte_carlo,
)
from pmssc.errors import DomainError


def direct_upper(mu, d):
    # independently coded form of the same bound
    return min(1.0, (math.exp(d) / (1 + d) ** (1 + d)) ** mu)


def direct_lower(mu, d):
    return min(1.0, (math.exp(-d) / (1 - d) ** (1 - d)) ** mu)


def test_upper_closed_form_values():
    assert abs(chernoff_upper(1, 1) - math.e / 4) < 1e-12
    assert chernoff_upper(0, 1) == 1.0
    assert abs(chernoff_upper(2, 1) - (math.e / 4) ** 2) < 1e-12
    assert abs(chernoff_upper(2, 1) - 0.46182) < 1e-4


def test_lower_closed_form_values():
    expect = math.exp(-0.5) / 0.5**0.5
    assert abs(chernoff_lower(1, 0.5) - expect) < 1e-12
    assert abs(expect - 0.85776) < 1e-5
    assert abs(chernoff_lower(10, 0.5) - expect**10) < 1e-12
    # bound tends to 1 as delta -> 0
    assert chernoff_lower(5, 1e-9) > 1 - 1e-6


def test_domain_errors():
    with pytest.raises(DomainError):
        chernoff_upper(1, 0)
    with pytest.raises(DomainError):
        chernoff_upper(1, -0.5)
    with pytest.raises(DomainError):
        chernoff_lower(1, 0)
    with pytest.raises(DomainError):
        chernoff_lower(1, 1)
    with pytest.raises(DomainError):
        validate_bound_monte_carlo([1.0], [0.5], 0.5, UPPER, trials=100)


def test_identity_against_second_formula():
    for mu in (0.1, 0.5, 1, 3, 10, 50):
        for d in (0.1, 0.5, 1, 2, 5):
            assert abs(chernoff_upper(mu, d) - direct_upper(mu, d)) < 1e-9
        for d in (0.05, 0.3, 0.5, 0.9, 0.999):
            assert abs(chernoff_lower(mu, d) - direct_lower(mu, d)) < 1e-9


def test_monotone_decreasing_in_mu():
    grid = [0.5, 1, 2, 4, 8, 16, 32]
    up = [chernoff_upper(mu, 0.8) for mu in grid]
    low = [chernoff_lower(mu, 0.4) for mu in grid]
    for a, b in zip(up, up[1:]):
        assert b <= a
    for a, b in zip(low, low[1:]):
        assert b <= a


def test_log_space_no_overflow():
    assert chernoff_upper(1e6, 2.0) == 0.0 or chernoff_upper(1e6, 2.0) >= 0.0
    assert 0.0 <= chernoff_upper(1e6, 1e-3) <= 1.0


def test_monte_carlo_unit_weights():
    check = validate_bound_monte_carlo([1.0] * 20, [0.5] * 20, 0.5, UPPER, trials=100_000, seed=2)
    assert check.holds
    assert check.empirical_tail <= check.bound + 0.02


def test_monte_carlo_certain_variable():
    check = validate_bound_monte_carlo([1.0], [1.0], 0.25, UPPER, trials=10_000, seed=0)
    assert check.empirical_tail == 0.0
    assert check.holds


def test_monte_carlo_mixed_weights_lower_tail():
    check = validate_bound_monte_carlo(
        [1.0, 0.25, 0.5], [0.2, 0.9, 0.5], 0.3, LOWER, trials=100_000, seed=3
    )
    assert check.holds
