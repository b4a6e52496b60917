"""Instance presets and random instance families for experiments.

All generators are deterministic given their seed.  Reward scales are kept
near unit size so that absolute tolerances in the validation suites mean
the same thing across instances.
"""

from __future__ import annotations

import numpy as np

from .model import FeasibleFamily, Instance, downward_closure
from .rewards import (
    CoverageReward,
    ModularReward,
    PerturbedReward,
    SaturatingReward,
    SurrogatePair,
)


def disjoint_singletons(m: int = 2) -> Instance:
    """m single-state items under a size-1 budget, one objective per item.

    The classic instance where mixing is essential: every pure set has
    worst-case value 0 for m >= 2, while the uniform mixture achieves 1/m.
    """
    priors = [[1.0]] * m
    objectives = []
    for i in range(m):
        weights = [[1.0] if e == i else [0.0] for e in range(m)]
        objectives.append(ModularReward(weights))
    return Instance(priors=priors, objectives=objectives,
                    constraint=FeasibleFamily.uniform(m, 1))


def _random_priors(rng, n, max_states=2, forced_states=None):
    priors = []
    for e in range(n):
        s = forced_states if forced_states else int(rng.integers(1, max_states + 1))
        raw = rng.random(s) + 0.2
        priors.append(list(raw / raw.sum()))
    return priors


def _random_constraint(rng, n, kind=None, max_rank=None):
    if kind is None:
        kind = rng.choice(["uniform", "partition"])
    rank_cap = max_rank if max_rank is not None else n
    if kind == "uniform":
        k = int(rng.integers(1, min(n, rank_cap) + 1))
        return FeasibleFamily.uniform(n, k)
    if kind == "partition":
        n_parts = int(rng.integers(1, min(3, n) + 1))
        assignment = rng.integers(0, n_parts, size=n)
        assignment[: n_parts] = np.arange(n_parts)  # no empty part
        parts = [sorted(np.nonzero(assignment == j)[0].tolist()) for j in range(n_parts)]
        caps = [int(rng.integers(1, len(p) + 1)) for p in parts]
        if max_rank is not None:
            while sum(min(c, len(p)) for c, p in zip(caps, parts)) > max_rank:
                j = int(np.argmax(caps))
                caps[j] -= 1
        return FeasibleFamily.partition(n, parts, caps)
    if kind == "explicit":
        base = [
            sorted(rng.choice(n, size=int(rng.integers(1, min(3, n) + 1)), replace=False).tolist())
            for _ in range(3)
        ]
        sets = sorted([sorted(S) for S in downward_closure(base)], key=lambda s: (len(s), s))
        return FeasibleFamily.explicit(n, sets)
    raise ValueError(f"unknown constraint kind {kind!r}")


def _random_submodular_reward(rng, state_counts, universe=6):
    """A random monotone submodular reward on the given state profile."""
    n = len(state_counts)
    roll = rng.random()
    if roll < 0.4:
        cover = [
            [
                sorted(
                    rng.choice(
                        universe,
                        size=int(rng.integers(0, max(2, universe // 2))),
                        replace=False,
                    ).tolist()
                )
                for _ in range(state_counts[e])
            ]
            for e in range(n)
        ]
        weights = (0.3 + rng.random(universe) * 0.7) / max(2, universe // 2)
        return CoverageReward(cover, weights.tolist())
    weights = [
        [float(0.2 + 0.8 * rng.random()) for _ in range(state_counts[e])] for e in range(n)
    ]
    if roll < 0.7:
        return ModularReward(weights)
    cap = float(0.8 + rng.random() * (0.4 * n))
    return SaturatingReward(weights, cap)


def random_instance(seed_or_rng, *, n=4, m=2, max_states=2, epsilon=1.0,
                    constraint=None, max_rank=None, universe=6) -> Instance:
    """A random valid instance; epsilon < 1 wraps each reward in the
    size-perturbed construction around its submodular surrogate."""
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    priors = _random_priors(rng, n, max_states=max_states)
    state_counts = [len(p) for p in priors]
    fam = _random_constraint(rng, n, kind=constraint, max_rank=max_rank)
    objectives = []
    for _ in range(m):
        g = _random_submodular_reward(rng, state_counts, universe=universe)
        if epsilon >= 1.0:
            objectives.append(SurrogatePair.from_submodular(g))
        else:
            f = PerturbedReward(g, epsilon, levels=2)
            objectives.append(SurrogatePair(f=f, g=g, epsilon=epsilon))
    return Instance(priors=priors, objectives=objectives, constraint=fam)


_PRESETS = {
    "disjoint-singletons": lambda params, rng: disjoint_singletons(int(params.get("m", 2))),
    "coverage": None,  # filled below
    "modular": None,
    "mixed": None,
}


def _coverage_preset(params, rng):
    n = int(params.get("n", 6))
    return random_instance(
        rng,
        n=n,
        m=int(params.get("m", 3)),
        max_states=int(params.get("states", 2)),
        epsilon=float(params.get("eps", params.get("epsilon", 1.0))),
        constraint=params.get("constraint"),
        universe=int(params.get("universe", max(4, n))),
    )


def _modular_preset(params, rng):
    n = int(params.get("n", 5))
    m = int(params.get("m", 2))
    states = int(params.get("states", 2))
    priors = _random_priors(rng, n, forced_states=states)
    objectives = [
        ModularReward([[float(0.2 + 0.8 * rng.random()) for _ in range(states)] for _ in range(n)])
        for _ in range(m)
    ]
    fam = _random_constraint(rng, n, kind=params.get("constraint", "uniform"))
    return Instance(priors=priors, objectives=objectives, constraint=fam)


_PRESETS["coverage"] = _coverage_preset
_PRESETS["modular"] = _modular_preset
_PRESETS["mixed"] = lambda params, rng: random_instance(
    rng,
    n=int(params.get("n", 5)),
    m=int(params.get("m", 2)),
    max_states=int(params.get("states", 2)),
    epsilon=float(params.get("eps", params.get("epsilon", 1.0))),
)


def preset_names():
    return sorted(_PRESETS)


def generate_instance(preset: str, params: dict | None = None, seed: int = 0) -> Instance:
    """Build a preset instance deterministically from a seed."""
    if preset not in _PRESETS:
        raise ValueError(f"unknown preset {preset!r}; known: {', '.join(preset_names())}")
    rng = np.random.default_rng(seed)
    return _PRESETS[preset](params or {}, rng)
