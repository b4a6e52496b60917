"""General-case solvers: per-objective greedy mixtures and the double oracle.

Both return non-adaptive mixed-set policies.  The mixture solver optimizes
each objective on its own and plays one of the m resulting sets uniformly
at random; the double oracle grows a support of candidate sets by
best-responding to the adversary's optimal mix over objectives until no
improving set is found.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .lp import solve_matrix_game
from .model import Instance
from .policies import MixedSetPolicy, optimal_nonadaptive_value, robust_value
from .values import value_oracle

MARGINAL_TOL = 1e-12


def _objective_value(vo, S, weights, samples, rng):
    """lambda-weighted induced value of a set, exact when enumerable."""
    total = 0.0
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        if vo.exact_available(S):
            total += w * vo.exact(S, i)
        else:
            total += w * vo.mc(S, i, samples, rng)[0]
    return total


def _greedy(instance: Instance, weights, *, lazy: bool, samples=2000, rng=None):
    """Greedy maximization of a nonnegative combination of induced values.

    Lazy evaluation is only sound when the combined objective is submodular,
    so callers enable it just for declared-submodular instances.
    """
    family = instance.constraint
    vo = value_oracle(instance)
    S: frozenset = frozenset()
    val = _objective_value(vo, S, weights, samples, rng)

    if lazy:
        # (stale upper bound, id) max-heap via negation
        heap = [
            (-(_objective_value(vo, frozenset([e]), weights, samples, rng) - val), e)
            for e in range(instance.n)
            if family.is_feasible([e])
        ]
        heapq.heapify(heap)
        while heap:
            neg, e = heapq.heappop(heap)
            if e in S or not family.is_feasible(S | {e}):
                continue
            gain = _objective_value(vo, S | {e}, weights, samples, rng) - val
            if heap and gain < -heap[0][0] - MARGINAL_TOL:
                heapq.heappush(heap, (-gain, e))
                continue
            if gain <= MARGINAL_TOL:
                break
            S = S | {e}
            val += gain
        return S, val

    while True:
        best_gain, best_e = 0.0, None
        for e in range(instance.n):
            if e in S or not family.is_feasible(S | {e}):
                continue
            gain = _objective_value(vo, S | {e}, weights, samples, rng) - val
            # ascending scan: ties keep the lowest item id
            if best_e is None or gain > best_gain + MARGINAL_TOL:
                best_gain, best_e = gain, e
        if best_e is None or best_gain <= MARGINAL_TOL:
            return S, val
        S = S | {best_e}
        val += best_gain


@dataclass
class SingleObjectiveResult:
    """Greedy (or exhaustive) maximizer of one objective's induced value."""

    set: frozenset
    value: float
    alpha_claim: float
    exact_value: bool = True


def approx_single(instance: Instance, objective: int, *, samples=2000, rng=None,
                  alpha_default=None) -> SingleObjectiveResult:
    """Maximize one objective's expected value over the feasible family.

    Matroid families use (lazy) greedy; small explicit families are
    brute-forced.  ``alpha_claim`` records the guarantee of the method used:
    1/2 for greedy on a matroid with a submodular objective, the honest
    ``epsilon^2/2`` default otherwise.
    """
    pair = instance.objectives[objective]
    weights = np.zeros(instance.m)
    weights[objective] = 1.0
    vo = value_oracle(instance)
    if instance.constraint.is_matroid:
        lazy = pair.epsilon == 1.0 and vo.exact_available()
        S, val = _greedy(instance, weights, lazy=lazy, samples=samples, rng=rng)
    else:
        best = None
        for cand in instance.constraint.feasible_sets():
            v = _objective_value(vo, cand, weights, samples, rng)
            key = (-v, len(cand), sorted(cand))
            if best is None or key < best[0]:
                best = (key, cand, v)
        S, val = best[1], best[2]
    if pair.epsilon == 1.0 and instance.constraint.is_matroid:
        alpha = 0.5
    else:
        alpha = alpha_default if alpha_default is not None else pair.epsilon**2 / 2.0
    return SingleObjectiveResult(
        set=S, value=float(val), alpha_claim=float(alpha),
        exact_value=vo.exact_available(S),
    )


def greedy_mixture(instance: Instance, *, samples=2000, rng=None):
    """Optimize each objective separately, then play one of the m solutions
    uniformly at random.  Duplicate sets merge their probabilities."""
    m = instance.m
    results = [approx_single(instance, i, samples=samples, rng=rng) for i in range(m)]
    counts: dict[frozenset, int] = {}
    for r in results:
        counts[r.set] = counts.get(r.set, 0) + 1
    support = tuple((S, c / m) for S, c in counts.items())
    policy = MixedSetPolicy(support)
    alpha = min(r.alpha_claim for r in results)
    return policy, results, alpha


def best_response(instance: Instance, lam, *, exhaustive=False, samples=2000, rng=None):
    """Feasible set maximizing the lambda-weighted induced objective."""
    lam = np.asarray(lam, dtype=float)
    if lam.size != instance.m or lam.min() < -1e-12 or abs(lam.sum() - 1.0) > 1e-6:
        raise ValueError("lambda must be a probability vector over objectives")
    vo = value_oracle(instance)
    if exhaustive or not instance.constraint.is_matroid:
        best = None
        for cand in instance.constraint.feasible_sets():
            v = _objective_value(vo, cand, lam, samples, rng)
            key = (-v, len(cand), sorted(cand))
            if best is None or key < best[0]:
                best = (key, cand, v)
        return best[1], float(best[2])
    lazy = instance.all_submodular and vo.exact_available()
    S, val = _greedy(instance, lam, lazy=lazy, samples=samples, rng=rng)
    return S, float(val)


@dataclass
class DoubleOracleResult:
    policy: MixedSetPolicy
    value: float
    iterations: int
    converged: bool
    game_values: list = field(default_factory=list)
    beta_estimate: float | None = None


def double_oracle(instance: Instance, tol: float = 1e-6, max_iter: int = 200, *,
                  exhaustive_br: bool = False, samples=2000, rng=None,
                  compute_beta: bool = False) -> DoubleOracleResult:
    """Column generation for the max-min selection game.

    The adversary over the m objectives is finite, so the restricted game is
    solved exactly each round and only the set player needs an oracle.  The
    support starts from the per-objective greedy sets, which already realize
    the uniform-mixture value.
    """
    vo = value_oracle(instance)
    _, singles, _ = greedy_mixture(instance, samples=samples, rng=rng)
    supports: list[frozenset] = []
    for r in singles:
        if r.set not in supports:
            supports.append(r.set)

    def payoff_row(S):
        return [
            vo.exact(S, i) if vo.exact_available(S) else vo.mc(S, i, samples, rng)[0]
            for i in range(instance.m)
        ]

    payoff = [payoff_row(S) for S in supports]
    game_values: list[float] = []
    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        sol = solve_matrix_game(np.array(payoff))
        game_values.append(float(sol.value))
        br_set, br_val = best_response(
            instance, sol.col_strategy, exhaustive=exhaustive_br, samples=samples, rng=rng
        )
        if br_val <= sol.value + tol or br_set in supports:
            converged = True
            break
        supports.append(br_set)
        payoff.append(payoff_row(br_set))

    support = tuple(
        (supports[r], float(p)) for r, p in enumerate(sol.row_strategy) if p > 1e-12
    )
    total = sum(p for _, p in support)
    support = tuple((S, p / total) for S, p in support)
    policy = MixedSetPolicy(support)

    beta = None
    if compute_beta:
        try:
            opt, _ = optimal_nonadaptive_value(instance)
            beta = 1.0 if opt <= 1e-12 else float(sol.value) / opt
        except Exception:
            beta = None
    return DoubleOracleResult(
        policy=policy, value=float(sol.value), iterations=iterations,
        converged=converged, game_values=game_values, beta_estimate=beta,
    )
