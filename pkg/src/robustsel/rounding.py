"""Randomized rounding of fractional solutions into feasible sets.

Swap rounding merges the weighted sets of a decomposition pairwise,
exchanging differing elements one at a time inside the same capacity slot,
and preserves every item's marginal probability exactly.  It applies to
uniform and partition matroids; other families fall back to independent
rounding followed by a greedy feasibility repair.

Because the objective is a minimum over several expectations, a single
rounded set can be far worse than the fractional value even when each
objective individually rounds well; the outcome therefore reports both the
best pure set and the mixed policy given by the decomposition itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .continuous_greedy import FractionalSolution
from .model import FeasibleFamily, Instance
from .policies import MixedSetPolicy, robust_value
from .values import value_oracle


def _padded_parts(family: FeasibleFamily, S):
    """Per-part slots of a set, padded with sentinels up to each capacity."""
    parts, caps = family.parts_and_caps()
    padded = []
    for j, (part, cap) in enumerate(zip(parts, caps)):
        members = set(part)
        real = sorted(int(e) for e in S if int(e) in members)
        slots = list(real) + [("pad", j, t) for t in range(cap - len(real))]
        padded.append(set(slots))
    return padded


def _slot_key(v):
    # real items sort before pad sentinels; both deterministically
    return (0, v) if isinstance(v, int) else (1, v[2])


def swap_round(solution, family: FeasibleFamily, rng: np.random.Generator) -> frozenset:
    """Round a decomposition to one feasible set, preserving item marginals.

    Accepts a FractionalSolution or a bare decomposition list.  Requires a
    uniform or partition matroid; use ``independent_round_repair`` otherwise.
    """
    if not family.is_matroid:
        raise ValueError(
            "swap rounding needs a uniform or partition matroid; "
            "use independent_round_repair for other families"
        )
    decomposition = (
        solution.decomposition if isinstance(solution, FractionalSolution) else list(solution)
    )
    pieces = [(frozenset(S), float(w)) for S, w in decomposition if w > 0.0]
    total = sum(w for _, w in pieces)
    if total > 1 + 1e-9:
        raise ValueError("decomposition weights exceed 1")
    if 1.0 - total > 1e-12:
        pieces.append((frozenset(), 1.0 - total))
    if not pieces:
        return frozenset()

    merged = _padded_parts(family, pieces[0][0])
    weight = pieces[0][1]
    for S, w in pieces[1:]:
        other = _padded_parts(family, S)
        for j in range(len(merged)):
            a, b = merged[j], other[j]
            while a != b:
                i = min(a - b, key=_slot_key)
                k = min(b - a, key=_slot_key)
                if rng.random() < weight / (weight + w):
                    b.discard(k)
                    b.add(i)
                else:
                    a.discard(i)
                    a.add(k)
        weight += w
    out = frozenset(e for slots in merged for e in slots if isinstance(e, int))
    return out


def independent_round_repair(x, family: FeasibleFamily, rng: np.random.Generator,
                             *, instance: Instance | None = None, samples=512) -> frozenset:
    """Include each item independently with probability x_e, then repair.

    Repair greedily drops the item with the smallest average marginal value
    across objectives (requires the instance); without an instance the item
    with the smallest inclusion probability goes first.
    """
    x = np.asarray(x, dtype=float)
    u = rng.random(family.n)
    S = set(int(e) for e in np.nonzero(u < x)[0])
    if family.is_feasible(S):
        return frozenset(S)
    vo = value_oracle(instance) if instance is not None else None

    def avg_marginal(e):
        if vo is None:
            return x[e]
        total = 0.0
        for i in range(instance.m):
            hi = vo.value(S, i, samples=samples, rng=rng)
            lo = vo.value(S - {e}, i, samples=samples, rng=rng)
            total += hi - lo
        return total / instance.m

    while not family.is_feasible(S):
        drop = min(sorted(S), key=avg_marginal)
        S.discard(drop)
    return frozenset(S)


@dataclass
class RoundingOutcome:
    best_set: frozenset
    best_value: float
    method: str  # "swap" | "independent-repair"
    repetitions: int
    zeta_hat: float
    mixed_policy: MixedSetPolicy
    mixed_value: float
    value_exact: bool = True
    value_stderr: float = 0.0


def best_of_rounds(solution: FractionalSolution, family: FeasibleFamily,
                   repetitions: int, rng: np.random.Generator,
                   instance: Instance, samples=2000) -> RoundingOutcome:
    """Draw several rounded sets and keep the one with the best worst-case value.

    Also evaluates the decomposition itself as a mixed policy and reports
    the empirical rounding loss (best pure value over fractional value).
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    vo = value_oracle(instance)
    method = "swap" if family.is_matroid else "independent-repair"

    best_set, best_val, best_err = None, -np.inf, 0.0
    for _ in range(repetitions):
        if method == "swap":
            S = swap_round(solution, family, rng)
        else:
            S = independent_round_repair(solution.x, family, rng, instance=instance,
                                         samples=samples)
        vals, errs = [], []
        for i in range(instance.m):
            if vo.exact_available(S):
                vals.append(vo.exact(S, i))
                errs.append(0.0)
            else:
                v, e = vo.mc(S, i, samples, rng)
                vals.append(v)
                errs.append(e)
        worst = min(range(instance.m), key=lambda i: vals[i])
        if vals[worst] > best_val:
            best_set, best_val, best_err = S, vals[worst], errs[worst]

    pieces = list(solution.decomposition)
    total = sum(w for _, w in pieces)
    if 1.0 - total > 1e-12:
        pieces.append((frozenset(), 1.0 - total))
    mixed = MixedSetPolicy(tuple(pieces))
    mixed_value = robust_value(instance, mixed)

    frac_min = solution.min_value
    zeta = 1.0 if frac_min <= 1e-12 else best_val / frac_min
    return RoundingOutcome(
        best_set=best_set, best_value=float(best_val), method=method,
        repetitions=repetitions, zeta_hat=float(zeta), mixed_policy=mixed,
        mixed_value=float(mixed_value),
        value_exact=vo.exact_available(best_set), value_stderr=best_err,
    )
