"""The feasible-set polytope: inequality rows and vertex decompositions.

For uniform and partition matroids the polytope conv{1_S : S feasible} has
the explicit description 0 <= x <= 1 with per-part sums at most the part
capacity, and any point in it can be peeled greedily into a convex
combination of at most O(n) feasible-set indicators.  Explicit families
fall back to an LP over their enumerated vertices.
"""

from __future__ import annotations

import numpy as np

from .errors import SolverError
from .lp import LinearProgram, solve_lp
from .model import FeasibleFamily


def polytope_rows(family: FeasibleFamily):
    """Inequality rows (coeffs, "<=", rhs) describing P(I) inside [0,1]^n."""
    if not family.is_matroid:
        raise ValueError("explicit families have no inequality description; enumerate vertices")
    rows = []
    parts, caps = family.parts_and_caps()
    for part, cap in zip(parts, caps):
        coeffs = np.zeros(family.n)
        coeffs[part] = 1.0
        rows.append((coeffs, "<=", float(cap)))
    return rows


def point_in_polytope(family: FeasibleFamily, x, tol=1e-9) -> bool:
    x = np.asarray(x, dtype=float)
    if x.min() < -tol or x.max() > 1 + tol:
        return False
    if family.is_matroid:
        parts, caps = family.parts_and_caps()
        return all(x[part].sum() <= cap + tol for part, cap in zip(parts, caps))
    try:
        decompose_point(family, x, tol=max(tol, 1e-12))
        return True
    except SolverError:
        return False


def _peel_matroid(family, x, tol):
    """Greedy peeling for uniform/partition matroids.

    Maintains the invariant that the residual lies in the polytope scaled by
    the unassigned weight; each step removes a weighted feasible set chosen
    from the largest coordinates and triggers at least one permanent event
    (a coordinate hits zero, pins to the scaled cap, or a part goes tight),
    so the loop ends after O(n + #parts) steps.
    """
    n = family.n
    parts, caps = family.parts_and_caps()
    part_of = np.zeros(n, dtype=int)
    for j, part in enumerate(parts):
        part_of[part] = j
    x = np.asarray(x, dtype=float).copy()
    pieces = []
    assigned = 0.0
    max_steps = 2 * n + len(parts) + 8
    for _ in range(max_steps):
        support = np.nonzero(x > tol)[0]
        if support.size == 0:
            break
        remaining = 1.0 - assigned
        if remaining <= tol:
            raise SolverError("point is not in the polytope: weight budget exhausted")
        order = sorted(support, key=lambda e: (-x[e], e))
        chosen = []
        counts = [0] * len(parts)
        for e in order:
            j = part_of[e]
            if counts[j] < caps[j]:
                counts[j] += 1
                chosen.append(int(e))
        if not chosen:
            raise SolverError("point is not in the polytope: positive mass but zero-rank family")
        lam = min(remaining, min(x[e] for e in chosen))
        in_chosen = np.zeros(n, dtype=bool)
        in_chosen[chosen] = True
        for e in support:
            if not in_chosen[e]:
                lam = min(lam, remaining - x[e])
        for j, part in enumerate(parts):
            if counts[j] < caps[j]:
                xj = x[part].sum()
                lam = min(lam, (caps[j] * remaining - xj) / (caps[j] - counts[j]))
        if lam <= tol:
            raise SolverError("decomposition stalled; point outside the polytope?")
        x[chosen] -= lam
        assigned += lam
        pieces.append((frozenset(chosen), lam))
    if (x > 10 * tol).any():
        raise SolverError("decomposition left residual mass; point outside the polytope?")
    merged = {}
    for S, w in pieces:
        merged[S] = merged.get(S, 0.0) + w
    return sorted(merged.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))


def _decompose_explicit(family, x, tol):
    sets = family.feasible_sets()
    n = family.n
    nv = len(sets)
    obj = np.zeros(nv)
    rows = []
    for e in range(n):
        coeffs = np.array([1.0 if e in S else 0.0 for S in sets])
        rows.append((coeffs, "=", float(x[e])))
    rows.append((np.ones(nv), "<=", 1.0))
    res = solve_lp(LinearProgram(obj, rows))
    if res.status != "optimal":
        raise SolverError("point is not in the polytope of the explicit family")
    out = [(sets[i], float(w)) for i, w in enumerate(res.x) if w > tol]
    return sorted(out, key=lambda kv: (len(kv[0]), sorted(kv[0])))


def decompose_point(family: FeasibleFamily, x, tol=1e-12):
    """Express x in P(I) as a subconvex combination of feasible-set indicators.

    Returns (set, weight) pieces with weights summing to at most 1 and
    sum_S weight * 1_S reconstructing x.
    """
    x = np.asarray(x, dtype=float)
    if x.size != family.n:
        raise ValueError("point dimension differs from ground-set size")
    x = np.clip(x, 0.0, 1.0)
    if family.is_matroid:
        return _peel_matroid(family, x, tol)
    return _decompose_explicit(family, x, tol)


def reconstruction_error(pieces, x) -> float:
    """Max coordinate error of sum_S w_S 1_S against x."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for S, w in pieces:
        for e in S:
            acc[e] += w
    return float(np.abs(acc - x).max()) if x.size else 0.0
