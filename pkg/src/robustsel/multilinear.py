"""Multilinear extension of induced set functions.

For a set function U on items, F(x) = sum over subsets S of U(S) times the
probability of drawing S when each item e is included independently with
probability x_e.  Exact mode evaluates that defining sum (small n only);
Monte Carlo mode samples item inclusion and, when wired to an instance,
also realizes item states and evaluates the reward directly.  Gradient
estimates couple all coordinates through common random draws.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CapExceededError
from .model import Instance
from .values import DEFAULT_ENUM_CAP, value_oracle


def check_fractional_point(x, n) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a point of dimension {n}, got shape {x.shape}")
    if (x < -1e-12).any() or (x > 1 + 1e-12).any():
        raise ValueError("coordinates must lie in [0, 1]")
    return np.clip(x, 0.0, 1.0)


def _subset_probs(x):
    """Probability of each subset bitmask under independent inclusion."""
    p = np.array([1.0])
    for xe in x:
        p = np.concatenate([p * (1.0 - xe), p * xe])
    return p


def _subset_prob_delta(x, e):
    """d/dx_e of the subset probabilities, as a vector over bitmasks."""
    p = np.array([1.0])
    for i, xe in enumerate(x):
        if i == e:
            p = np.concatenate([-p, p])
        else:
            p = np.concatenate([p * (1.0 - xe), p * xe])
    return p


class ExtensionOracle:
    """Evaluator of the multilinear extension of one induced set function."""

    def __init__(self, set_function, n, *, mode="exact", samples=2000,
                 instance=None, objective=None, cap=DEFAULT_ENUM_CAP):
        if mode not in ("exact", "mc"):
            raise ValueError(f"unknown mode {mode!r}")
        self.set_function = set_function
        self.n = int(n)
        self.mode = mode
        self.samples = int(samples)
        self.instance = instance
        self.objective = objective
        self.cap = cap
        self._table = None
        if mode == "exact" and 2**self.n > cap:
            raise CapExceededError(
                f"2^{self.n} subsets exceed cap {cap}; use Monte Carlo mode"
            )

    @classmethod
    def from_instance(cls, instance: Instance, objective: int, *, mode="auto",
                      samples=2000, cap=DEFAULT_ENUM_CAP):
        vo = value_oracle(instance)
        cost = 2**instance.n * instance.realization_count()
        if mode == "auto":
            mode = "exact" if cost <= cap else "mc"
        if mode == "exact" and cost > cap:
            raise CapExceededError(
                f"exact extension would enumerate 2^{instance.n} subsets x "
                f"{instance.realization_count()} realizations (cap {cap}); use Monte Carlo mode"
            )
        fn = lambda S: vo.exact(S, objective)
        return cls(fn, instance.n, mode=mode, samples=samples,
                   instance=instance, objective=objective, cap=cap)

    # -- exact machinery ---------------------------------------------------

    def _values_table(self):
        if self._table is None:
            table = np.empty(2**self.n)
            for mask in range(2**self.n):
                S = frozenset(e for e in range(self.n) if mask >> e & 1)
                table[mask] = self.set_function(S)
            self._table = table
        return self._table

    def _exact_value(self, x):
        return float(_subset_probs(x) @ self._values_table())

    def _exact_gradient(self, x):
        table = self._values_table()
        return np.array([float(_subset_prob_delta(x, e) @ table) for e in range(self.n)])

    # -- Monte Carlo machinery ----------------------------------------------

    def _draw(self, rng, samples):
        """Common random numbers: inclusion uniforms and realized states."""
        include_u = rng.random((samples, self.n))
        states = None
        if self.instance is not None:
            state_u = rng.random((samples, self.n))
            states = np.empty((samples, self.n), dtype=int)
            for e in range(self.n):
                cum = self.instance._cum[e]
                col = np.searchsorted(cum, state_u[:, e], side="right")
                states[:, e] = np.minimum(col, len(cum) - 1)
        return include_u, states

    def _sample_value(self, included, states, t):
        S = np.nonzero(included)[0]
        if states is not None:
            f = self.instance.objectives[self.objective].f
            return f.evaluate((int(e), int(states[t, e])) for e in S)
        return self.set_function(frozenset(int(e) for e in S))

    def _mc_values(self, x, rng):
        include_u, states = self._draw(rng, self.samples)
        inc = include_u < x
        return np.array([self._sample_value(inc[t], states, t) for t in range(self.samples)])

    # -- public surface ------------------------------------------------------

    def value(self, x, rng=None) -> float:
        x = check_fractional_point(x, self.n)
        if self.mode == "exact":
            return self._exact_value(x)
        return float(self._mc_values(x, self._require_rng(rng)).mean())

    def value_with_stderr(self, x, rng=None):
        x = check_fractional_point(x, self.n)
        if self.mode == "exact":
            return self._exact_value(x), 0.0
        vals = self._mc_values(x, self._require_rng(rng))
        stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        return float(vals.mean()), stderr

    def marginal(self, e, x, rng=None) -> float:
        """F(x with coordinate e forced to 1) - F(x)."""
        x = check_fractional_point(x, self.n)
        up = x.copy()
        up[e] = 1.0
        if self.mode == "exact":
            return self._exact_value(up) - self._exact_value(x)
        rng = self._require_rng(rng)
        include_u, states = self._draw(rng, self.samples)
        base = include_u < x
        forced = base.copy()
        forced[:, e] = True
        diffs = [
            self._sample_value(forced[t], states, t) - self._sample_value(base[t], states, t)
            for t in range(self.samples)
        ]
        return float(np.mean(diffs))

    def gradient(self, x, rng=None) -> np.ndarray:
        """Per-coordinate partial derivatives, coupled across coordinates in MC mode."""
        x = check_fractional_point(x, self.n)
        if self.mode == "exact":
            return self._exact_gradient(x)
        rng = self._require_rng(rng)
        include_u, states = self._draw(rng, self.samples)
        inc = include_u < x
        grad = np.zeros(self.n)
        for e in range(self.n):
            hi = inc.copy()
            hi[:, e] = True
            lo = inc.copy()
            lo[:, e] = False
            diffs = [
                self._sample_value(hi[t], states, t) - self._sample_value(lo[t], states, t)
                for t in range(self.samples)
            ]
            grad[e] = float(np.mean(diffs))
        return grad

    @staticmethod
    def _require_rng(rng):
        if rng is None:
            raise ValueError("Monte Carlo mode needs an explicit rng")
        return rng


def extension_value(oracle: ExtensionOracle, x, rng=None) -> float:
    return oracle.value(x, rng)


def marginal(oracle: ExtensionOracle, e, x, rng=None) -> float:
    return oracle.marginal(e, x, rng)


def gradient(oracle: ExtensionOracle, x, rng=None) -> np.ndarray:
    return oracle.gradient(x, rng)
