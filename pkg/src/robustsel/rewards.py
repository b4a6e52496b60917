"""Monotone reward functions over (item, state) pairs.

A reward maps a set of picked items together with their observed states to
a nonnegative number.  All shipped kinds are monotone by construction:
``modular`` and ``weighted-coverage`` and ``saturating-sum`` are also
submodular, while ``perturbed`` rescales a submodular base by a
size-dependent multiplier so that it stays within a multiplicative bracket
of the base without being submodular itself.

A reward can be paired with a submodular surrogate that brackets it as
``epsilon * g(X) <= f(X) <= g(X) / epsilon``; ``check_surrogate_bounds``
verifies the bracket exhaustively on small pair universes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


def _check_pairs(pairs):
    """Normalize to a frozenset of (item, state), rejecting duplicate items."""
    ps = frozenset((int(e), int(s)) for e, s in pairs)
    items = [e for e, _ in ps]
    if len(set(items)) != len(items):
        seen = set()
        dup = next(e for e in items if e in seen or seen.add(e))
        raise ValueError(f"item {dup} appears with more than one state")
    for e, s in ps:
        if e < 0 or s < 0:
            raise ValueError(f"negative item or state index in pair ({e}, {s})")
    return ps


class RewardFunction:
    """Base class for monotone rewards on sets of (item, state) pairs."""

    kind = "base"

    def evaluate(self, pairs) -> float:
        raise NotImplementedError

    def __call__(self, pairs) -> float:
        return self.evaluate(pairs)

    def validate_shape(self, state_counts) -> None:
        """Check that parameters cover every (item, state) of the instance."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _validate_weight_table(weights, state_counts, what="weights"):
    if len(weights) != len(state_counts):
        raise ValueError(f"{what} rows ({len(weights)}) != number of items ({len(state_counts)})")
    for e, row in enumerate(weights):
        if len(row) != state_counts[e]:
            raise ValueError(f"{what}[{e}] has {len(row)} entries, item has {state_counts[e]} states")


class ModularReward(RewardFunction):
    """Sum of independent per-(item, state) weights."""

    kind = "modular"

    def __init__(self, weights):
        self.weights = tuple(tuple(float(w) for w in row) for row in weights)
        for e, row in enumerate(self.weights):
            if not row:
                raise ValueError(f"weights[{e}] is empty")
            if any(w < 0 for w in row):
                raise ValueError(f"weights[{e}] contains a negative entry")

    def evaluate(self, pairs):
        ps = _check_pairs(pairs)
        return float(sum(self.weights[e][s] for e, s in ps))

    def validate_shape(self, state_counts):
        _validate_weight_table(self.weights, state_counts)

    def to_dict(self):
        return {"kind": self.kind, "weights": [list(r) for r in self.weights]}


class CoverageReward(RewardFunction):
    """Weighted coverage: each (item, state) covers a subset of a universe.

    The value of a pair set is the total weight of the union of covered
    universe elements.
    """

    kind = "weighted-coverage"

    def __init__(self, cover, universe_weights):
        self.cover = tuple(
            tuple(frozenset(int(u) for u in cell) for cell in row) for row in cover
        )
        self.universe_weights = tuple(float(w) for w in universe_weights)
        if any(w < 0 for w in self.universe_weights):
            raise ValueError("universe_weights contains a negative entry")
        for e, row in enumerate(self.cover):
            for s, cell in enumerate(row):
                bad = [u for u in cell if u < 0 or u >= len(self.universe_weights)]
                if bad:
                    raise ValueError(f"cover[{e}][{s}] references unknown universe element {bad[0]}")

    def evaluate(self, pairs):
        ps = _check_pairs(pairs)
        covered = frozenset().union(*(self.cover[e][s] for e, s in ps)) if ps else frozenset()
        return float(sum(self.universe_weights[u] for u in covered))

    def validate_shape(self, state_counts):
        _validate_weight_table(self.cover, state_counts, what="cover")

    def to_dict(self):
        return {
            "kind": self.kind,
            "cover": [[sorted(cell) for cell in row] for row in self.cover],
            "universe_weights": list(self.universe_weights),
        }


class SaturatingReward(RewardFunction):
    """Weighted sum truncated at a cap: min(cap, sum of pair weights)."""

    kind = "saturating-sum"

    def __init__(self, weights, cap):
        self.weights = tuple(tuple(float(w) for w in row) for row in weights)
        self.cap = float(cap)
        if self.cap < 0:
            raise ValueError("cap must be nonnegative")
        for e, row in enumerate(self.weights):
            if any(w < 0 for w in row):
                raise ValueError(f"weights[{e}] contains a negative entry")

    def evaluate(self, pairs):
        ps = _check_pairs(pairs)
        return float(min(self.cap, sum(self.weights[e][s] for e, s in ps)))

    def validate_shape(self, state_counts):
        _validate_weight_table(self.weights, state_counts)

    def to_dict(self):
        return {"kind": self.kind, "weights": [list(r) for r in self.weights], "cap": self.cap}


class PerturbedReward(RewardFunction):
    """Submodular base rescaled by a monotone size-dependent multiplier.

    The multiplier ``epsilon * (1/epsilon^2)^(min(|X|, L)/L)`` grows from
    ``epsilon`` at the empty set to ``1/epsilon`` once ``|X| >= L``, so the
    result always stays inside the multiplicative bracket of the base while
    breaking submodularity for ``epsilon < 1``.
    """

    kind = "perturbed"

    def __init__(self, base, epsilon, levels=2):
        if not isinstance(base, RewardFunction):
            raise TypeError("base must be a RewardFunction")
        if not 0 < float(epsilon) <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if int(levels) < 1:
            raise ValueError("levels must be a positive integer")
        self.base = base
        self.epsilon = float(epsilon)
        self.levels = int(levels)

    def multiplier(self, size: int) -> float:
        frac = min(size, self.levels) / self.levels
        return self.epsilon * (1.0 / self.epsilon**2) ** frac

    def evaluate(self, pairs):
        ps = _check_pairs(pairs)
        return self.base.evaluate(ps) * self.multiplier(len(ps))

    def validate_shape(self, state_counts):
        self.base.validate_shape(state_counts)

    def to_dict(self):
        return {
            "kind": self.kind,
            "base": self.base.to_dict(),
            "epsilon": self.epsilon,
            "levels": self.levels,
        }


_REWARD_KINDS = {
    cls.kind: cls for cls in (ModularReward, CoverageReward, SaturatingReward, PerturbedReward)
}


def reward_from_dict(d: dict) -> RewardFunction:
    """Rebuild a reward from its ``to_dict`` form."""
    kind = d.get("kind")
    if kind not in _REWARD_KINDS:
        raise ValueError(f"unknown reward kind {kind!r}")
    if kind == "modular":
        return ModularReward(d["weights"])
    if kind == "weighted-coverage":
        return CoverageReward(d["cover"], d["universe_weights"])
    if kind == "saturating-sum":
        return SaturatingReward(d["weights"], d["cap"])
    return PerturbedReward(reward_from_dict(d["base"]), d["epsilon"], d.get("levels", 2))


@dataclass(frozen=True)
class SurrogatePair:
    """A reward together with a submodular surrogate bracketing it.

    For a submodular reward the surrogate is the reward itself with
    ``epsilon = 1``.
    """

    f: RewardFunction
    g: RewardFunction
    epsilon: float = 1.0

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")

    @classmethod
    def from_submodular(cls, f: RewardFunction) -> "SurrogatePair":
        return cls(f=f, g=f, epsilon=1.0)


class ObjectiveFamily:
    """Nonempty collection of surrogate-bracketed rewards sharing a ground set."""

    def __init__(self, members):
        members = tuple(members)
        if not members:
            raise ValueError("objective family must be nonempty")
        for i, p in enumerate(members):
            if not isinstance(p, SurrogatePair):
                raise TypeError(f"objective {i} is not a SurrogatePair")
        self.members = members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def epsilon(self) -> float:
        """Smallest declared epsilon across the family."""
        return min(p.epsilon for p in self.members)


@dataclass
class SurrogateReport:
    """Result of checking the surrogate bracket over a pair universe."""

    passed: bool
    exhaustive: bool
    checked: int
    worst_violation: float
    worst_set: frozenset | None


def _iter_valid_pair_sets(state_counts):
    """All pair sets with at most one state per item."""
    choices = [[None] + list(range(c)) for c in state_counts]
    for combo in itertools.product(*choices):
        yield frozenset((e, s) for e, s in enumerate(combo) if s is not None)


def check_surrogate_bounds(pair, state_counts, cap=2**20, samples=4096, seed=0):
    """Verify ``epsilon*g <= f <= g/epsilon`` over pair sets.

    Exhaustive when the universe has at most ``cap`` valid pair sets,
    otherwise a seeded random sample (flagged in the report).
    """
    total = 1
    for c in state_counts:
        total *= 1 + c
    exhaustive = total <= cap
    if exhaustive:
        sets = _iter_valid_pair_sets(state_counts)
        checked = total
    else:
        rng = np.random.default_rng(seed)
        sets = (
            frozenset(
                (e, int(rng.integers(0, state_counts[e])))
                for e in range(len(state_counts))
                if rng.random() < 0.5
            )
            for _ in range(samples)
        )
        checked = samples

    eps = pair.epsilon
    worst = 0.0
    worst_set = None
    for X in sets:
        fv = pair.f.evaluate(X)
        gv = pair.g.evaluate(X)
        tol = 1e-9 * max(1.0, abs(fv), abs(gv))
        violation = max(eps * gv - fv, fv - gv / eps)
        if violation > max(worst, tol):
            worst = violation
            worst_set = X
    return SurrogateReport(
        passed=worst_set is None,
        exhaustive=exhaustive,
        checked=checked,
        worst_violation=worst,
        worst_set=worst_set,
    )


def _valid_masks(universe):
    """Bitmasks over universe indices with at most one state per item."""
    n = len(universe)
    conflict = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j and universe[i][0] == universe[j][0]:
                conflict[i] |= 1 << j
    masks = []
    stack = [(0, 0)]
    while stack:
        mask, start = stack.pop()
        masks.append(mask)
        for i in range(start, n):
            if not (conflict[i] & mask):
                stack.append((mask | (1 << i), i + 1))
    return masks, conflict


def _mask_values(f, universe, masks):
    vals = {}
    for m in masks:
        vals[m] = f.evaluate(frozenset(universe[i] for i in range(len(universe)) if m >> i & 1))
    return vals


def is_submodular_bruteforce(f, universe, tol=1e-9):
    """Exhaustively test diminishing returns of ``f`` on a small pair universe.

    Only pair sets with at most one state per item are quantified over,
    matching the domain on which rewards are defined.
    """
    universe = [(int(e), int(s)) for e, s in universe]
    if len(universe) > 16:
        raise ValueError("universe too large for brute-force check (max 16 pairs)")
    masks, conflict = _valid_masks(universe)
    vals = _mask_values(f, universe, masks)
    n = len(universe)
    for s2 in masks:
        for v in range(n):
            if (s2 >> v & 1) or (conflict[v] & s2):
                continue
            big_gain = vals[s2 | (1 << v)] - vals[s2]
            s1 = s2
            while True:
                if vals[s1 | (1 << v)] - vals[s1] < big_gain - tol:
                    return False
                if s1 == 0:
                    break
                s1 = (s1 - 1) & s2
    return True


def is_monotone_bruteforce(f, universe, tol=1e-9):
    """Exhaustively test that adding any pair never decreases ``f``."""
    universe = [(int(e), int(s)) for e, s in universe]
    if len(universe) > 16:
        raise ValueError("universe too large for brute-force check (max 16 pairs)")
    masks, conflict = _valid_masks(universe)
    vals = _mask_values(f, universe, masks)
    for m in masks:
        for v in range(len(universe)):
            if (m >> v & 1) or (conflict[v] & m):
                continue
            if vals[m | (1 << v)] < vals[m] - tol:
                return False
    return True
