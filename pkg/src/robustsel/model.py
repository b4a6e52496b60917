"""Ground-set model: items, state priors, feasibility families, instances.

Items carry dense integer ids.  Each item reveals a random state, drawn
independently from a finite per-item prior, once it is picked.  A
feasibility family restricts which item sets may be picked; all supported
kinds are downward-closed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, InstanceFormatError
from .rewards import ObjectiveFamily, SurrogatePair

PROB_TOL = 1e-9


@dataclass(frozen=True)
class Item:
    id: int
    label: str | None = None


@dataclass(frozen=True)
class StatePrior:
    """Probability mass over the finite state set of one item."""

    item: int
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if not self.probs:
            raise ValueError(f"prior for item {self.item} has no states")
        if any(p < 0 for p in self.probs):
            raise ValueError(f"prior for item {self.item} has a negative mass")
        if abs(sum(self.probs) - 1.0) > PROB_TOL:
            raise ValueError(
                f"prior for item {self.item} sums to {sum(self.probs)!r}, expected 1"
            )

    @property
    def n_states(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class Realization:
    """A joint assignment of one state index per item."""

    states: tuple[int, ...]

    def pairs(self, S=None):
        """(item, state) pairs for the given item set (default: all items)."""
        if S is None:
            S = range(len(self.states))
        return frozenset((e, self.states[e]) for e in S)


class FeasibleFamily:
    """Downward-closed family of feasible item sets.

    Kinds:
      * ``uniform``   -- all sets of size at most k (uniform matroid),
      * ``partition`` -- per-part cardinality caps (partition matroid),
      * ``explicit``  -- an explicit list of sets, verified downward-closed.
    """

    def __init__(self, kind, n, *, k=None, parts=None, capacities=None, sets=None):
        self.kind = kind
        self.n = int(n)
        if self.n < 0:
            raise ValueError("ground-set size must be nonnegative")
        if kind == "uniform":
            if k is None or int(k) < 0:
                raise ValueError("uniform family needs k >= 0")
            self.k = int(k)
        elif kind == "partition":
            if parts is None or capacities is None:
                raise ValueError("partition family needs parts and capacities")
            self.parts = tuple(tuple(sorted(int(e) for e in part)) for part in parts)
            self.capacities = tuple(int(c) for c in capacities)
            if len(self.parts) != len(self.capacities):
                raise ValueError("parts and capacities lengths differ")
            if any(c < 0 for c in self.capacities):
                raise ValueError("capacities must be nonnegative")
            flat = sorted(e for part in self.parts for e in part)
            if flat != list(range(self.n)):
                raise ValueError("parts must partition the ground set exactly")
            self._part_of = [0] * self.n
            for j, part in enumerate(self.parts):
                for e in part:
                    self._part_of[e] = j
        elif kind == "explicit":
            if sets is None:
                raise ValueError("explicit family needs its list of sets")
            self.sets = frozenset(frozenset(int(e) for e in S) for S in sets)
            for S in self.sets:
                if any(e < 0 or e >= self.n for e in S):
                    raise ValueError(f"set {sorted(S)} leaves the ground set")
            if frozenset() not in self.sets:
                raise ValueError("explicit family must contain the empty set")
            # downward closure is equivalent to closure under single removals
            for S in self.sets:
                for e in S:
                    if S - {e} not in self.sets:
                        raise ValueError(
                            f"family is not downward-closed: {sorted(S - {e})} missing"
                        )
        else:
            raise ValueError(f"unknown family kind {kind!r}")

    @classmethod
    def uniform(cls, n, k):
        return cls("uniform", n, k=k)

    @classmethod
    def partition(cls, n, parts, capacities):
        return cls("partition", n, parts=parts, capacities=capacities)

    @classmethod
    def explicit(cls, n, sets):
        return cls("explicit", n, sets=sets)

    @property
    def is_matroid(self) -> bool:
        return self.kind in ("uniform", "partition")

    def parts_and_caps(self):
        """Slot structure used by the polytope and swap-rounding machinery."""
        if self.kind == "uniform":
            return [list(range(self.n))], [min(self.k, self.n)]
        if self.kind == "partition":
            return [list(p) for p in self.parts], [min(c, len(p)) for p, c in zip(self.parts, self.capacities)]
        raise ValueError("explicit families have no part structure")

    def rank(self) -> int:
        if self.kind == "uniform":
            return min(self.k, self.n)
        if self.kind == "partition":
            return sum(min(c, len(p)) for p, c in zip(self.parts, self.capacities))
        return max((len(S) for S in self.sets), default=0)

    def is_feasible(self, S) -> bool:
        S = frozenset(int(e) for e in S)
        if any(e < 0 or e >= self.n for e in S):
            raise ValueError("set contains items outside the ground set")
        if self.kind == "uniform":
            return len(S) <= self.k
        if self.kind == "partition":
            counts = [0] * len(self.parts)
            for e in S:
                counts[self._part_of[e]] += 1
            return all(c <= cap for c, cap in zip(counts, self.capacities))
        return S in self.sets

    def feasible_sets(self, cap=2**20):
        """All feasible sets, sorted by (size, elements).  Raises beyond cap."""
        if self.kind == "uniform":
            count = sum(math.comb(self.n, r) for r in range(min(self.k, self.n) + 1))
            if count > cap:
                raise CapExceededError(f"{count} feasible sets exceed cap {cap}")
            out = [
                frozenset(c)
                for r in range(min(self.k, self.n) + 1)
                for c in itertools.combinations(range(self.n), r)
            ]
        elif self.kind == "partition":
            per_part = []
            count = 1
            for part, cap_j in zip(self.parts, self.capacities):
                subsets = [
                    frozenset(c)
                    for r in range(min(cap_j, len(part)) + 1)
                    for c in itertools.combinations(part, r)
                ]
                per_part.append(subsets)
                count *= len(subsets)
                if count > cap:
                    raise CapExceededError(f"feasible-set count exceeds cap {cap}")
            out = [frozenset().union(*combo) for combo in itertools.product(*per_part)]
        else:
            if len(self.sets) > cap:
                raise CapExceededError(f"{len(self.sets)} feasible sets exceed cap {cap}")
            out = list(self.sets)
        out.sort(key=lambda S: (len(S), sorted(S)))
        return out

    def max_weight(self, weights):
        """A feasible set maximizing total weight; nonpositive weights skipped.

        Matroid kinds use the greedy rule (sort by weight, ties by lower id);
        explicit families are brute-forced.
        """
        weights = [float(w) for w in weights]
        if len(weights) != self.n:
            raise ValueError("weights length differs from ground-set size")
        if self.is_matroid:
            chosen = []
            order = sorted(range(self.n), key=lambda e: (-weights[e], e))
            if self.kind == "uniform":
                for e in order:
                    if weights[e] <= 0 or len(chosen) >= self.k:
                        break
                    chosen.append(e)
            else:
                counts = [0] * len(self.parts)
                for e in order:
                    if weights[e] <= 0:
                        break
                    j = self._part_of[e]
                    if counts[j] < self.capacities[j]:
                        counts[j] += 1
                        chosen.append(e)
            S = frozenset(chosen)
            return S, float(sum(weights[e] for e in S))
        best = None
        for S in self.feasible_sets():
            trimmed = frozenset(e for e in S if weights[e] > 0)
            total = sum(weights[e] for e in trimmed)
            key = (-total, sorted(trimmed))
            if best is None or key < best[0]:
                best = (key, trimmed, total)
        return best[1], float(best[2])

    def to_dict(self):
        if self.kind == "uniform":
            return {"type": "uniform", "n": self.n, "k": self.k}
        if self.kind == "partition":
            return {
                "type": "partition",
                "n": self.n,
                "parts": [list(p) for p in self.parts],
                "capacities": list(self.capacities),
            }
        return {
            "type": "explicit",
            "n": self.n,
            "sets": sorted([sorted(S) for S in self.sets], key=lambda s: (len(s), s)),
        }

    @classmethod
    def from_dict(cls, d):
        t = d.get("type")
        if t == "uniform":
            return cls.uniform(d["n"], d["k"])
        if t == "partition":
            return cls.partition(d["n"], d["parts"], d["capacities"])
        if t == "explicit":
            return cls.explicit(d["n"], d["sets"])
        raise ValueError(f"unknown constraint type {t!r}")

    def __repr__(self):
        if self.kind == "uniform":
            return f"FeasibleFamily.uniform(n={self.n}, k={self.k})"
        if self.kind == "partition":
            return f"FeasibleFamily.partition(n={self.n}, parts={self.parts}, capacities={self.capacities})"
        return f"FeasibleFamily.explicit(n={self.n}, {len(self.sets)} sets)"


def downward_closure(sets):
    """Close a collection of item sets under taking subsets."""
    closed = set()
    stack = [frozenset(S) for S in sets]
    closed.add(frozenset())
    while stack:
        S = stack.pop()
        if S in closed:
            continue
        closed.add(S)
        for e in S:
            stack.append(S - {e})
    return closed


class Instance:
    """A robust selection instance: stochastic items, objectives, constraint.

    Immutable after construction; evaluation caches are attached lazily by
    the value oracle and never mutate the model itself.
    """

    def __init__(self, priors, objectives, constraint, items=None):
        coerced = []
        for i, p in enumerate(priors):
            if isinstance(p, StatePrior):
                if p.item != i:
                    raise InstanceFormatError(f"priors[{i}]", f"covers item {p.item}, expected {i}")
                coerced.append(p)
            else:
                try:
                    coerced.append(StatePrior(i, tuple(p)))
                except ValueError as exc:
                    raise InstanceFormatError(f"priors[{i}]", str(exc)) from exc
        self.priors = tuple(coerced)
        n = len(self.priors)

        if items is None:
            items = [Item(i) for i in range(n)]
        self.items = tuple(items)
        if [it.id for it in self.items] != list(range(n)):
            raise InstanceFormatError("items", "ids must be unique and contiguous from 0")

        if isinstance(objectives, ObjectiveFamily):
            self.objectives = objectives
        else:
            members = [
                p if isinstance(p, SurrogatePair) else SurrogatePair.from_submodular(p)
                for p in objectives
            ]
            try:
                self.objectives = ObjectiveFamily(members)
            except (TypeError, ValueError) as exc:
                raise InstanceFormatError("objectives", str(exc)) from exc

        if not isinstance(constraint, FeasibleFamily):
            raise InstanceFormatError("constraint", "expected a FeasibleFamily")
        if constraint.n != n:
            raise InstanceFormatError(
                "constraint", f"ground-set size {constraint.n} != number of items {n}"
            )
        self.constraint = constraint

        counts = self.state_counts
        for i, pair in enumerate(self.objectives):
            for name, fn in (("f", pair.f), ("g", pair.g)):
                try:
                    fn.validate_shape(counts)
                except ValueError as exc:
                    raise InstanceFormatError(f"objectives[{i}].{name}", str(exc)) from exc

        self._cum = tuple(np.cumsum(p.probs) for p in self.priors)

    @property
    def n(self) -> int:
        return len(self.priors)

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def state_counts(self) -> tuple[int, ...]:
        return tuple(p.n_states for p in self.priors)

    @property
    def epsilon(self) -> float:
        return self.objectives.epsilon

    @property
    def all_submodular(self) -> bool:
        return all(p.epsilon == 1.0 for p in self.objectives)

    def realization_count(self, S=None) -> int:
        counts = self.state_counts
        if S is None:
            S = range(self.n)
        out = 1
        for e in S:
            out *= counts[e]
        return out

    def __repr__(self):
        return f"Instance(n={self.n}, m={self.m}, constraint={self.constraint!r})"


def sample_realization(instance: Instance, rng: np.random.Generator) -> Realization:
    """Draw one joint state vector from the product of the item priors."""
    u = rng.random(instance.n)
    states = tuple(
        int(np.searchsorted(instance._cum[e], u[e], side="right"))
        for e in range(instance.n)
    )
    # guard against u landing exactly on the final cumulative 1.0 boundary
    states = tuple(min(s, instance.priors[e].n_states - 1) for e, s in enumerate(states))
    return Realization(states)


def enumerate_realizations(instance: Instance, cap=10**6):
    """All realizations with their product probabilities."""
    total = instance.realization_count()
    if total > cap:
        raise CapExceededError(f"{total} realizations: too large to enumerate (cap {cap})")
    out = []
    for states in itertools.product(*(range(p.n_states) for p in instance.priors)):
        prob = 1.0
        for e, s in enumerate(states):
            prob *= instance.priors[e].probs[s]
        out.append((Realization(states), prob))
    return out


def is_feasible(family: FeasibleFamily, S) -> bool:
    return family.is_feasible(S)


def max_weight_feasible(family: FeasibleFamily, weights):
    return family.max_weight(weights)
