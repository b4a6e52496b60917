"""Independent brute-force optima used by tests and acceptance checks.

Everything here is exhaustive enumeration plus an LP solve.  Expected
values are recomputed from scratch by enumerating restricted realizations
rather than through the shared value oracle, so these results never depend
on the solver code paths they are used to judge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .lp import LinearProgram, solve_lp, solve_matrix_game
from .model import Instance
from .policies import MixedSetPolicy, optimal_adaptive_value


@dataclass
class OracleResult:
    value: float
    argmax: object  # MixedSetPolicy or a list of (PolicyTree, prob)
    enumeration_size: int


def _expected_value(instance: Instance, S, objective: int) -> float:
    """Expectation of one objective over the priors of the items in S."""
    f = instance.objectives[objective].f
    items = sorted(int(e) for e in S)
    priors = instance.priors
    total = 0.0
    for states in itertools.product(*(range(priors[e].n_states) for e in items)):
        prob = 1.0
        for e, s in zip(items, states):
            prob *= priors[e].probs[s]
        if prob:
            total += prob * f.evaluate(zip(items, states))
    return total


def _payoff(instance: Instance, sets):
    return np.array(
        [[_expected_value(instance, S, i) for i in range(instance.m)] for S in sets]
    )


def exact_nonadaptive_optimum(instance: Instance, cap=2**20) -> OracleResult:
    """Optimal distribution over feasible sets (full matrix game)."""
    sets = instance.constraint.feasible_sets(cap=cap)
    sol = solve_matrix_game(_payoff(instance, sets))
    support = tuple(
        (sets[r], float(p)) for r, p in enumerate(sol.row_strategy) if p > 1e-12
    )
    total = sum(p for _, p in support)
    support = tuple((S, p / total) for S, p in support)
    return OracleResult(
        value=float(sol.value), argmax=MixedSetPolicy(support), enumeration_size=len(sets)
    )


def exact_nonadaptive_relaxed(instance: Instance, cap=2**20) -> OracleResult:
    """Same optimum under the sub-probability relaxation (weights sum <= 1).

    For monotone objectives this coincides with the distribution optimum;
    the LP keeps the relaxation explicit so that equality is checkable.
    """
    sets = instance.constraint.feasible_sets(cap=cap)
    payoff = _payoff(instance, sets)
    ns = len(sets)
    obj = np.zeros(ns + 1)
    obj[ns] = 1.0
    rows = []
    for i in range(instance.m):
        coeffs = np.zeros(ns + 1)
        coeffs[:ns] = payoff[:, i]
        coeffs[ns] = -1.0
        rows.append((coeffs, ">=", 0.0))
    total = np.zeros(ns + 1)
    total[:ns] = 1.0
    rows.append((total, "<=", 1.0))
    bounds = [(0.0, None)] * ns + [(None, None)]
    res = solve_lp(LinearProgram(obj, rows, bounds))
    weights = np.clip(res.x[:ns], 0.0, None)
    support = tuple((sets[r], float(w)) for r, w in enumerate(weights) if w > 1e-12)
    policy = MixedSetPolicy(support, regime="subdistribution")
    return OracleResult(value=float(res.value), argmax=policy, enumeration_size=ns)


def exact_adaptive_optimum(instance: Instance, **caps) -> OracleResult:
    """Optimal randomized adaptive policy (game over enumerated trees)."""
    value, mix = optimal_adaptive_value(instance, **caps)
    return OracleResult(value=value, argmax=mix, enumeration_size=len(mix))
