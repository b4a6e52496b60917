"""Robust continuous greedy: fractional ascent toward a common target value.

Given a target value, the ascent takes T uniform steps.  Each step solves a
small LP for a direction v in the feasible-set polytope maximizing the
worst objective's projected progress; a negative optimal slack certifies
that no distribution over feasible sets reaches the target, which is what
drives the binary search on the target downward.  Every step direction is
decomposed into feasible-set indicators, so the final point always comes
with an explicit subconvex decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .heuristics import approx_single
from .lp import LinearProgram, solve_lp
from .model import FeasibleFamily, Instance
from .multilinear import ExtensionOracle
from .polytope import decompose_point, polytope_rows
from .values import DEFAULT_ENUM_CAP

DEFAULT_SEED = 1729


@dataclass
class GreedyConfig:
    steps: int = 100
    target_tol: float = 1e-3  # relative width at which the binary search stops
    mc_samples: int = 2000
    seed: int = DEFAULT_SEED
    exact: bool | None = None  # None = exact extension when the cap allows
    certificate_tol: float = 1e-7
    success_tol: float = 1e-6

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.target_tol <= 0:
            raise ValueError("target_tol must be positive")


@dataclass
class FractionalSolution:
    """A point in the polytope with its decomposition and per-objective values."""

    x: np.ndarray
    decomposition: list  # [(frozenset, weight)]
    values: list  # per-objective extension values at x
    target: float
    stderrs: list = field(default_factory=list)
    trivial: bool = False

    @property
    def min_value(self) -> float:
        return min(self.values)


@dataclass
class Certificate:
    """Witness that no feasible distribution reaches the target on all objectives."""

    target: float
    reason: str = "no feasible solution attains value target for all objectives"


def best_direction(family: FeasibleFamily, grads, residuals):
    """Direction in P(I) maximizing the worst projected progress.

    Solves max_z { z : v . grad_i - residual_i >= z, v in P(I) } and returns
    (v, slack, pieces) where pieces decompose v into feasible sets.  A slack
    below -tolerance means no direction covers every residual.
    """
    grads = [np.asarray(g, dtype=float) for g in grads]
    residuals = np.asarray(residuals, dtype=float)
    m = len(grads)
    n = family.n

    if family.is_matroid:
        # variables: v_0..v_{n-1} in [0,1], z free
        obj = np.zeros(n + 1)
        obj[n] = 1.0
        rows = []
        for i in range(m):
            coeffs = np.zeros(n + 1)
            coeffs[:n] = grads[i]
            coeffs[n] = -1.0
            rows.append((coeffs, ">=", float(residuals[i])))
        for coeffs, rel, rhs in polytope_rows(family):
            row = np.zeros(n + 1)
            row[:n] = coeffs
            rows.append((row, rel, rhs))
        bounds = [(0.0, 1.0)] * n + [(None, None)]
        res = solve_lp(LinearProgram(obj, rows, bounds))
        if res.status != "optimal":
            raise SolverError(f"direction LP came back {res.status}")
        v = np.clip(res.x[:n], 0.0, 1.0)
        slack = float(res.value)
        pieces = decompose_point(family, v)
        return v, slack, pieces

    # explicit family: optimize directly over vertex weights
    sets = family.feasible_sets()
    ns = len(sets)
    obj = np.zeros(ns + 1)
    obj[ns] = 1.0
    rows = []
    set_grad = np.array([[sum(g[e] for e in S) for S in sets] for g in grads])
    for i in range(m):
        coeffs = np.zeros(ns + 1)
        coeffs[:ns] = set_grad[i]
        coeffs[ns] = -1.0
        rows.append((coeffs, ">=", float(residuals[i])))
    total = np.zeros(ns + 1)
    total[:ns] = 1.0
    rows.append((total, "<=", 1.0))
    bounds = [(0.0, None)] * ns + [(None, None)]
    res = solve_lp(LinearProgram(obj, rows, bounds))
    if res.status != "optimal":
        raise SolverError(f"direction LP came back {res.status}")
    lam = np.clip(res.x[:ns], 0.0, None)
    v = np.zeros(family.n)
    pieces = []
    for idx, w in enumerate(lam):
        if w > 1e-12:
            pieces.append((sets[idx], float(w)))
            for e in sets[idx]:
                v[e] += w
    return np.clip(v, 0.0, 1.0), float(res.value), pieces


def _build_oracles(instance: Instance, config: GreedyConfig, cap=DEFAULT_ENUM_CAP):
    exact = config.exact
    if exact is None:
        exact = 2**instance.n * instance.realization_count() <= cap
    mode = "exact" if exact else "mc"
    return [
        ExtensionOracle.from_instance(instance, i, mode=mode, samples=config.mc_samples)
        for i in range(instance.m)
    ], exact


def ascend_to_target(instance: Instance, target: float, config: GreedyConfig,
                     oracles=None, rng=None):
    """Run the T-step ascent for one target value.

    Returns a FractionalSolution whose worst objective reaches
    ``(1 - 1/e) * target`` (up to the configured tolerance), or a
    Certificate when a step's direction LP proves the target unreachable.
    """
    if target < 0:
        raise ValueError("target must be nonnegative")
    if oracles is None:
        oracles, _ = _build_oracles(instance, config)
    exact = all(o.mode == "exact" for o in oracles)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = instance.n
    family = instance.constraint

    x = np.zeros(n)
    pieces: list = []
    if target == 0.0:
        vals = [o.value(x, rng) for o in oracles]
        errs = [0.0 if exact else o.value_with_stderr(x, rng)[1] for o in oracles]
        return FractionalSolution(x=x, decomposition=[], values=vals,
                                  target=0.0, stderrs=errs, trivial=True)

    T = config.steps
    for _ in range(T):
        grads = [o.gradient(x, rng) for o in oracles]
        fvals = [o.value(x, rng) for o in oracles]
        residuals = [target - fv for fv in fvals]
        v, slack, vpieces = best_direction(family, grads, residuals)
        if slack < -config.certificate_tol:
            return Certificate(target=target)
        x = np.clip(x + v / T, 0.0, 1.0)
        pieces.extend((S, w / T) for S, w in vpieces)

    merged: dict[frozenset, float] = {}
    for S, w in pieces:
        merged[S] = merged.get(S, 0.0) + w
    decomposition = sorted(merged.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))

    if exact:
        values = [o.value(x) for o in oracles]
        stderrs = [0.0] * len(oracles)
        allowance = 0.0
    else:
        pairs = [o.value_with_stderr(x, rng) for o in oracles]
        values = [p[0] for p in pairs]
        stderrs = [p[1] for p in pairs]
        allowance = 3.0 * max(stderrs)

    threshold = (1.0 - 1.0 / math.e) * target - config.success_tol - allowance
    if min(values) >= threshold:
        return FractionalSolution(x=x, decomposition=decomposition, values=values,
                                  target=target, stderrs=stderrs)
    return Certificate(target=target)


def solve_fractional(instance: Instance, config: GreedyConfig | None = None):
    """Binary search on the target value around the ascent.

    The search keeps the solution of the largest target that succeeded; the
    upper end starts at twice the best single-objective greedy value, which
    no distribution over feasible sets can beat.  If every positive target
    fails, the trivial all-zeros solution is returned with its flag set.
    """
    if config is None:
        config = GreedyConfig()
    oracles, _ = _build_oracles(instance, config)
    rng = np.random.default_rng(config.seed)

    singles = [approx_single(instance, i, samples=config.mc_samples, rng=rng)
               for i in range(instance.m)]
    upper = 2.0 * min(s.value for s in singles)
    best = ascend_to_target(instance, 0.0, config, oracles=oracles, rng=rng)
    if upper <= 0:
        return best

    lo, hi = 0.0, upper
    width_floor = config.target_tol * max(upper, 1e-12)
    while hi - lo > width_floor:
        mid = 0.5 * (lo + hi)
        result = ascend_to_target(instance, mid, config, oracles=oracles, rng=rng)
        if isinstance(result, FractionalSolution):
            lo, best = mid, result
        else:
            hi = mid
    return best
