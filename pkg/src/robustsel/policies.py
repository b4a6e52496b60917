"""Adaptive and non-adaptive policies, and exact small-scale optima.

An adaptive policy is a decision tree: each internal node picks an item and
branches on the observed state; leaves stop.  A non-adaptive policy is a
probability distribution over feasible item sets, committed before any
observation.  On tiny instances both kinds can be optimized exactly by
enumerating pure strategies and solving the induced matrix game against
the adversary choosing the objective, which is what powers the
adaptivity-gap experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError
from .lp import solve_matrix_game
from .model import FeasibleFamily, Instance
from .values import value_oracle

STOP = None  # leaf marker in serialized form


@dataclass(frozen=True)
class PolicyNode:
    """Tree node: pick ``item`` and branch per state, or stop when item is None."""

    item: int | None
    children: tuple = ()

    @property
    def is_stop(self) -> bool:
        return self.item is None


STOP_NODE = PolicyNode(None, ())


@dataclass(frozen=True)
class PolicyTree:
    """Deterministic adaptive policy as a decision tree over item states."""

    root: PolicyNode

    def validate(self, instance: Instance) -> None:
        family = instance.constraint
        counts = instance.state_counts

        def walk(node, picked):
            if node.is_stop:
                return
            if node.item in picked:
                raise ValueError(f"item {node.item} repeats on a path")
            new = picked | {node.item}
            if not family.is_feasible(new):
                raise ValueError(f"path set {sorted(new)} is infeasible")
            if len(node.children) != counts[node.item]:
                raise ValueError(
                    f"node for item {node.item} has {len(node.children)} children, "
                    f"expected {counts[node.item]}"
                )
            for child in node.children:
                walk(child, new)

        walk(self.root, frozenset())

    def depth(self) -> int:
        def d(node):
            if node.is_stop:
                return 0
            return 1 + max(d(c) for c in node.children)

        return d(self.root)


@dataclass(frozen=True)
class MixedSetPolicy:
    """Distribution (or subdistribution) over feasible item sets.

    ``regime`` records whether the weights are a full probability
    distribution ("distribution", summing to 1) or may leave slack
    ("subdistribution", summing to at most 1).
    """

    support: tuple  # ((frozenset, probability), ...)
    regime: str = "distribution"
    approximate: bool = False

    def __post_init__(self):
        support = tuple(
            (frozenset(int(e) for e in S), float(p)) for S, p in self.support
        )
        support = tuple(sorted(support, key=lambda kv: (len(kv[0]), sorted(kv[0]))))
        object.__setattr__(self, "support", support)
        if any(p < -1e-12 for _, p in support):
            raise ValueError("support probabilities must be nonnegative")
        total = sum(p for _, p in support)
        if total > 1 + 1e-9:
            raise ValueError(f"support probabilities sum to {total!r} > 1")
        if self.regime == "distribution" and abs(total - 1.0) > 1e-9:
            raise ValueError(f"distribution weights sum to {total!r}, expected 1")
        if self.regime not in ("distribution", "subdistribution"):
            raise ValueError(f"unknown regime {self.regime!r}")

    @classmethod
    def point_mass(cls, S) -> "MixedSetPolicy":
        return cls(((frozenset(S), 1.0),))

    def total_mass(self) -> float:
        return sum(p for _, p in self.support)

    def validate(self, instance: Instance) -> None:
        for S, _ in self.support:
            if not instance.constraint.is_feasible(S):
                raise ValueError(f"support set {sorted(S)} is infeasible")

    def sample(self, rng: np.random.Generator) -> frozenset:
        """Draw one set; unassigned mass (subdistributions) falls to the empty set."""
        u = rng.random()
        acc = 0.0
        for S, p in self.support:
            acc += p
            if u < acc:
                return S
        return frozenset()


def evaluate_policy_exact(instance: Instance, tree: PolicyTree, objective: int) -> float:
    """Exact expected reward of a tree: weighted walk over its branches."""
    f = instance.objectives[objective].f
    priors = instance.priors

    def walk(node, pairs):
        if node.is_stop:
            return f.evaluate(pairs)
        total = 0.0
        for s, child in enumerate(node.children):
            p = priors[node.item].probs[s]
            if p == 0.0:
                continue
            total += p * walk(child, pairs + [(node.item, s)])
        return total

    return walk(tree.root, [])


def evaluate_policy_mc(instance: Instance, tree: PolicyTree, objective: int,
                       samples: int, rng: np.random.Generator):
    """Monte Carlo fallback for trees too deep to walk exactly."""
    from .model import sample_realization

    f = instance.objectives[objective].f
    vals = np.empty(samples)
    for t in range(samples):
        y = sample_realization(instance, rng)
        node = tree.root
        pairs = []
        while not node.is_stop:
            s = y.states[node.item]
            pairs.append((node.item, s))
            node = node.children[s]
        vals[t] = f.evaluate(pairs)
    stderr = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return float(vals.mean()), stderr


def robust_value(instance: Instance, policy) -> float:
    """Worst objective value of a policy (tree or mixed-set)."""
    if isinstance(policy, PolicyTree):
        return min(
            evaluate_policy_exact(instance, policy, i) for i in range(instance.m)
        )
    vo = value_oracle(instance)
    best = None
    for i in range(instance.m):
        v = sum(p * vo.exact(S, i) for S, p in policy.support)
        best = v if best is None else min(best, v)
    return float(best)


def nonadaptive_from_adaptive(instance: Instance, tree: PolicyTree,
                              samples: int | None = None, rng=None) -> MixedSetPolicy:
    """The committed-set policy induced by a tree: virtually run the tree on a
    fresh realization and pick whatever set it would have picked."""
    if samples is not None:
        from .model import sample_realization

        rng = rng if rng is not None else np.random.default_rng(0)
        freq: dict[frozenset, int] = {}
        for _ in range(samples):
            y = sample_realization(instance, rng)
            node = tree.root
            picked = []
            while not node.is_stop:
                picked.append(node.item)
                node = node.children[y.states[node.item]]
            key = frozenset(picked)
            freq[key] = freq.get(key, 0) + 1
        support = tuple((S, c / samples) for S, c in freq.items())
        return MixedSetPolicy(support, approximate=True)

    priors = instance.priors
    weights: dict[frozenset, float] = {}

    def walk(node, picked, prob):
        if node.is_stop:
            key = frozenset(picked)
            weights[key] = weights.get(key, 0.0) + prob
            return
        for s, child in enumerate(node.children):
            p = priors[node.item].probs[s]
            if p == 0.0:
                continue
            walk(child, picked + [node.item], prob * p)

    walk(tree.root, [], 1.0)
    return MixedSetPolicy(tuple(weights.items()))


def enumerate_policy_trees(instance: Instance, *, max_items=4, max_states=3,
                           max_rank=3) -> list[PolicyTree]:
    """All deterministic feasible trees, early stops included.

    Shared subtrees are reused, so structurally identical subpolicies are
    represented once.  Hard caps keep the enumeration at desk scale.
    """
    n = instance.n
    counts = instance.state_counts
    family = instance.constraint
    if n > max_items:
        raise CapExceededError(f"{n} items exceed the tree-enumeration cap {max_items}")
    if max(counts) > max_states:
        raise CapExceededError(
            f"{max(counts)} states exceed the tree-enumeration cap {max_states}"
        )
    if family.rank() > max_rank:
        raise CapExceededError(
            f"family rank {family.rank()} exceeds the tree-enumeration cap {max_rank}"
        )

    import itertools

    memo: dict[tuple, list] = {}

    def gen(available, picked):
        key = (available, picked)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = [STOP_NODE]
        for e in sorted(available):
            if not family.is_feasible(picked | {e}):
                continue
            sub = gen(available - {e}, picked | {e})
            for combo in itertools.product(sub, repeat=counts[e]):
                out.append(PolicyNode(e, combo))
        memo[key] = out
        return out

    roots = gen(frozenset(range(n)), frozenset())
    return [PolicyTree(r) for r in roots]


def optimal_adaptive_value(instance: Instance, **caps):
    """Exact optimum over randomized adaptive policies (matrix game on trees)."""
    trees = enumerate_policy_trees(instance, **caps)
    payoff = np.array(
        [[evaluate_policy_exact(instance, t, i) for i in range(instance.m)] for t in trees]
    )
    sol = solve_matrix_game(payoff)
    mix = [(trees[r], float(p)) for r, p in enumerate(sol.row_strategy) if p > 1e-12]
    return float(sol.value), mix


def optimal_nonadaptive_value(instance: Instance, cap=2**20):
    """Exact optimum over distributions on feasible sets (matrix game on sets)."""
    sets = instance.constraint.feasible_sets(cap=cap)
    vo = value_oracle(instance)
    payoff = np.array([[vo.exact(S, i) for i in range(instance.m)] for S in sets])
    sol = solve_matrix_game(payoff)
    support = tuple(
        (sets[r], float(p)) for r, p in enumerate(sol.row_strategy) if p > 1e-12
    )
    total = sum(p for _, p in support)
    # tiny probabilities were filtered; renormalize the kept ones
    support = tuple((S, p / total) for S, p in support)
    return float(sol.value), MixedSetPolicy(support)


@dataclass
class GapReport:
    """Adaptivity-gap experiment on one instance."""

    adaptive_opt: float
    nonadaptive_opt: float
    ratio: float
    epsilon: float
    bound: float
    bound_satisfied: bool


def gap_experiment(instance: Instance, **caps) -> GapReport:
    """Compare the exact adaptive and non-adaptive optima against the
    epsilon^2/2 guarantee (1/2 for fully submodular instances)."""
    adaptive, _ = optimal_adaptive_value(instance, **caps)
    nonadaptive, _ = optimal_nonadaptive_value(instance)
    ratio = 1.0 if adaptive <= 1e-12 else nonadaptive / adaptive
    eps = instance.epsilon
    bound = eps * eps / 2.0
    return GapReport(
        adaptive_opt=adaptive,
        nonadaptive_opt=nonadaptive,
        ratio=ratio,
        epsilon=eps,
        bound=bound,
        bound_satisfied=ratio >= bound - 1e-9,
    )
