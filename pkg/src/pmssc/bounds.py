"""Weighted Chernoff tail bounds plus a Monte Carlo validation harness.

Both tails are evaluated in log space so large means cannot overflow, and
the result is clamped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .rng import stream

UPPER = "upper"
LOWER = "lower"


def chernoff_upper(mu: float, delta1: float) -> float:
    """Bound on Pr[X >= (1 + delta1) * mu]: (e^d / (1+d)^(1+d))^mu."""
    if delta1 <= 0:
        raise DomainError("delta1 must be positive")
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    exponent = mu * (delta1 - (1.0 + delta1) * math.log1p(delta1))
    return min(1.0, math.exp(exponent))


def chernoff_lower(mu: float, delta2: float) -> float:
    """Bound on Pr[X <= (1 - delta2) * mu]: (e^-d / (1-d)^(1-d))^mu.

    The (1-d)^(1-d) factor tends to 1 as d -> 1, which log1p handles
    continuously; d = 1 itself is outside the domain.
    """
    if not 0 < delta2 < 1:
        raise DomainError("delta2 must lie in (0, 1)")
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    exponent = mu * (-delta2 - (1.0 - delta2) * math.log1p(-delta2))
    return min(1.0, math.exp(exponent))


@dataclass(frozen=True)
class MonteCarloCheck:
    empirical_tail: float
    bound: float
    holds: bool


def validate_bound_monte_carlo(
    weights: Sequence[float],
    success_probs: Sequence[float],
    delta: float,
    side: str,
    trials: int = 100_000,
    seed: int = 0,
) -> MonteCarloCheck:
    """Sample X = sum w_i * Bernoulli(p_i) and compare the tail frequency
    against the closed-form bound (with sampling-noise slack)."""
    if trials < 10_000:
        raise DomainError("need at least 10^4 trials")
    if side not in (UPPER, LOWER):
        raise DomainError("side must be 'upper' or 'lower'")
    if len(weights) != len(success_probs):
        raise DomainError("weights and probabilities must align")
    if any(w < 0 or w > 1 for w in weights):
        raise DomainError("weights must lie in [0, 1]")
    if any(p < 0 or p > 1 for p in success_probs):
        raise DomainError("probabilities must lie in [0, 1]")

    import numpy as np

    w = np.asarray(weights, dtype=float)
    p = np.asarray(success_probs, dtype=float)
    mu = float(w @ p)
    if side == UPPER:
        bound = chernoff_upper(mu, delta)
        threshold = (1.0 + delta) * mu
    else:
        bound = chernoff_lower(mu, delta)
        threshold = (1.0 - delta) * mu

    rng = stream(seed)
    hits = 0
    done = 0
    chunk = 20_000
    while done < trials:
        batch = min(chunk, trials - done)
        draws = rng.random((batch, len(weights))) < p
        x = draws @ w
        if side == UPPER:
            hits += int(np.count_nonzero(x >= threshold))
        else:
            hits += int(np.count_nonzero(x <= threshold))
        done += batch
    empirical = hits / trials
    slack = 3.0 * math.sqrt(bound * (1.0 - bound) / trials) + 0.01
    return MonteCarloCheck(empirical, bound, empirical <= bound + slack)
