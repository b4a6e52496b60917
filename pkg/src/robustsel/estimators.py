"""Scikit-learn style solver facade.

Each solver is configured through its constructor, fit on an ``Instance``,
and exposes the computed policy and values as trailing-underscore
attributes, so the classes compose with ``get_params`` / ``set_params`` /
``clone`` and the rest of the estimator ecosystem.
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import continuous_greedy as cg
from .heuristics import double_oracle, greedy_mixture
from .rounding import best_of_rounds
from .validation import check_instance, check_seed
from .values import value_oracle

DEFAULT_SEED = cg.DEFAULT_SEED


class BaseRobustSolver(BaseEstimator):
    """Shared fit plumbing for the non-adaptive max-min solvers.

    Attributes set by ``fit``
    -------------------------
    policy_ : MixedSetPolicy
        The computed distribution over feasible sets.
    value_ : float
        Worst-objective expected value of ``policy_``.
    per_objective_ : list of float
        Expected value of ``policy_`` under each objective.
    value_exact_ : bool
        Whether values were computed by exact enumeration.
    elapsed_ : float
        Wall time of the fit, in seconds.
    """

    algorithm = "base"

    def fit(self, instance, y=None):
        instance = check_instance(instance)
        start = time.perf_counter()
        self._fit(instance)
        vo = value_oracle(instance)
        self.value_exact_ = vo.exact_available()
        rng = np.random.default_rng(check_seed(getattr(self, "random_state", 0)) + 1)
        per_obj = []
        for i in range(instance.m):
            total = 0.0
            for S, p in self.policy_.support:
                total += p * vo.value(S, i, samples=getattr(self, "mc_samples", 2000), rng=rng)
            per_obj.append(total)
        self.per_objective_ = per_obj
        self.value_ = float(min(per_obj))
        self.n_objectives_ = instance.m
        self.instance_ = instance
        self.elapsed_ = time.perf_counter() - start
        return self

    def _fit(self, instance):
        raise NotImplementedError

    def sample(self, n_sets=1, random_state=None):
        """Draw item sets from the fitted policy."""
        check_is_fitted(self, "policy_")
        rng = np.random.default_rng(check_seed(random_state))
        out = [self.policy_.sample(rng) for _ in range(n_sets)]
        return out[0] if n_sets == 1 else out


class GreedyMixtureSolver(BaseRobustSolver):
    """Per-objective greedy sets played uniformly at random.

    Parameters
    ----------
    mc_samples : int, default=2000
        Monte Carlo sample count used when exact expectations are out of reach.
    random_state : int, default=1729
        Seed for all stochastic estimation inside the fit.
    """

    algorithm = "one-over-m"

    def __init__(self, mc_samples=2000, random_state=DEFAULT_SEED):
        self.mc_samples = mc_samples
        self.random_state = random_state

    def _fit(self, instance):
        rng = np.random.default_rng(check_seed(self.random_state))
        policy, singles, alpha = greedy_mixture(
            instance, samples=self.mc_samples, rng=rng
        )
        self.policy_ = policy
        self.singles_ = singles
        self.alpha_claim_ = alpha


class DoubleOracleSolver(BaseRobustSolver):
    """Column generation against the objective-picking adversary.

    Parameters
    ----------
    tol : float, default=1e-6
        Convergence slack: stop once no set beats the game value by more.
    max_iter : int, default=200
        Iteration budget; ``converged_`` reports whether it sufficed.
    exhaustive_br : bool, default=False
        Brute-force the best response over all feasible sets (exact on
        small instances) instead of greedy.
    mc_samples : int, default=2000
    random_state : int, default=1729
    """

    algorithm = "double-oracle"

    def __init__(self, tol=1e-6, max_iter=200, exhaustive_br=False,
                 mc_samples=2000, random_state=DEFAULT_SEED):
        self.tol = tol
        self.max_iter = max_iter
        self.exhaustive_br = exhaustive_br
        self.mc_samples = mc_samples
        self.random_state = random_state

    def _fit(self, instance):
        rng = np.random.default_rng(check_seed(self.random_state))
        res = double_oracle(
            instance, tol=self.tol, max_iter=self.max_iter,
            exhaustive_br=self.exhaustive_br, samples=self.mc_samples, rng=rng,
        )
        self.policy_ = res.policy
        self.iterations_ = res.iterations
        self.converged_ = res.converged
        self.game_values_ = res.game_values
        self.beta_estimate_ = res.beta_estimate


class ContinuousGreedySolver(BaseRobustSolver):
    """Fractional ascent with binary search on the target, then rounding.

    Parameters
    ----------
    steps : int, default=100
        Ascent discretization (number of direction steps).
    gamma_tol : float, default=1e-3
        Relative width at which the target binary search stops.
    mc_samples : int, default=2000
        Extension samples per evaluation in Monte Carlo mode.
    exact_extension : bool or None, default=None
        Force exact (True) or sampled (False) extension values; None picks
        exact whenever the enumeration cap allows.
    rounds : int, default=32
        Rounding repetitions; the best pure set across them is kept.
    random_state : int, default=1729
    """

    algorithm = "continuous-greedy"

    def __init__(self, steps=100, gamma_tol=1e-3, mc_samples=2000,
                 exact_extension=None, rounds=32, random_state=DEFAULT_SEED):
        self.steps = steps
        self.gamma_tol = gamma_tol
        self.mc_samples = mc_samples
        self.exact_extension = exact_extension
        self.rounds = rounds
        self.random_state = random_state

    def _fit(self, instance):
        config = cg.GreedyConfig(
            steps=self.steps, target_tol=self.gamma_tol,
            mc_samples=self.mc_samples, seed=check_seed(self.random_state),
            exact=self.exact_extension,
        )
        solution = cg.solve_fractional(instance, config)
        rng = np.random.default_rng(check_seed(self.random_state) + 17)
        outcome = best_of_rounds(
            solution, instance.constraint, self.rounds, rng, instance,
            samples=self.mc_samples,
        )
        self.fractional_ = solution
        self.gamma_ = solution.target
        self.rounding_ = outcome
        self.best_set_ = outcome.best_set
        self.policy_ = outcome.mixed_policy


SOLVERS = {
    cls.algorithm: cls
    for cls in (GreedyMixtureSolver, DoubleOracleSolver, ContinuousGreedySolver)
}
