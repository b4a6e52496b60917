"""Expected reward of picking an item set: exact enumeration and Monte Carlo.

The induced set function of objective i is U(S, f_i) = E_y[f_i({(e, y_e) :
e in S})], the expectation running over the product prior restricted to the
picked items.  Exact values are cached per (objective, set) on the oracle,
which solvers share through ``value_oracle(instance)``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import CapExceededError
from .model import Instance

DEFAULT_ENUM_CAP = 10**6


class ValueOracle:
    """Cached evaluator of the induced set functions of one instance."""

    def __init__(self, instance: Instance, cap: int = DEFAULT_ENUM_CAP):
        self.instance = instance
        self.cap = cap
        self._cache: dict[tuple[int, frozenset], float] = {}

    def restriction_size(self, S) -> int:
        return self.instance.realization_count(S)

    def exact_available(self, S=None) -> bool:
        return self.restriction_size(S if S is not None else range(self.instance.n)) <= self.cap

    def exact(self, S, objective: int) -> float:
        """Exact expectation over the priors of the items in S."""
        S = frozenset(int(e) for e in S)
        key = (objective, S)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not self.exact_available(S):
            raise CapExceededError(
                f"{self.restriction_size(S)} restricted realizations exceed cap {self.cap}; "
                "use the Monte Carlo estimator"
            )
        f = self.instance.objectives[objective].f
        items = sorted(S)
        total = 0.0
        priors = self.instance.priors
        for states in itertools.product(*(range(priors[e].n_states) for e in items)):
            prob = 1.0
            for e, s in zip(items, states):
                prob *= priors[e].probs[s]
            if prob == 0.0:
                continue
            total += prob * f.evaluate(zip(items, states))
        self._cache[key] = total
        return total

    def mc(self, S, objective: int, samples: int, rng: np.random.Generator):
        """Unbiased sample mean and its standard error."""
        if samples < 1:
            raise ValueError("samples must be >= 1")
        S = sorted(frozenset(int(e) for e in S))
        f = self.instance.objectives[objective].f
        cums = [np.cumsum(self.instance.priors[e].probs) for e in S]
        limits = [self.instance.priors[e].n_states - 1 for e in S]
        u = rng.random((samples, len(S)))
        vals = np.empty(samples)
        for t in range(samples):
            pairs = [
                (e, min(int(np.searchsorted(cums[j], u[t, j], side="right")), limits[j]))
                for j, e in enumerate(S)
            ]
            vals[t] = f.evaluate(pairs)
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
        return mean, stderr

    def value(self, S, objective: int, *, samples: int = 2000, rng=None) -> float:
        """Exact value when enumerable, otherwise a Monte Carlo estimate."""
        if self.exact_available(S):
            return self.exact(S, objective)
        if rng is None:
            raise CapExceededError("exact value unavailable and no rng supplied for Monte Carlo")
        return self.mc(S, objective, samples, rng)[0]


def value_oracle(instance: Instance, cap: int = DEFAULT_ENUM_CAP) -> ValueOracle:
    """The shared, cached value oracle of an instance."""
    cached = getattr(instance, "_value_oracle", None)
    if cached is None or cached.cap != cap:
        cached = ValueOracle(instance, cap)
        instance._value_oracle = cached
    return cached


def induced_value_exact(instance: Instance, S, objective: int) -> float:
    return value_oracle(instance).exact(S, objective)


def induced_value_mc(instance: Instance, S, objective: int, samples: int, rng):
    return value_oracle(instance).mc(S, objective, samples, rng)
