"""Dense two-phase simplex and zero-sum matrix games.

The problems solved here are tiny (a few thousand variables at most), so a
dense tableau with Bland's anti-cycling rule is plenty: it is fully
deterministic, needs no external solver, and its exactness is checked
against vertex-enumeration oracles in the tests.

Conventions: maximize ``objective @ x`` subject to rows ``(coeffs, rel,
rhs)`` with ``rel`` one of "<=", ">=", "=", and per-variable bounds
``(lo, hi)`` where ``None`` means unbounded on that side.  The default
bound is ``(0, None)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-7


@dataclass
class LinearProgram:
    objective: np.ndarray
    rows: list
    bounds: list | None = None


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | None = None
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    max_violation: float = 0.0


def _standardize(lp: LinearProgram):
    """Rewrite into max c@t, A t (<=|=) b with t >= 0.

    Returns the standard objective, rows, the per-variable recovery recipe
    and the objective constant absorbed by shifts.
    """
    c = np.asarray(lp.objective, dtype=float)
    n = c.size
    bounds = lp.bounds if lp.bounds is not None else [(0.0, None)] * n
    if len(bounds) != n:
        raise ValueError("bounds length differs from objective length")

    terms = []  # per original var: list of (std column, sign)
    offsets = np.zeros(n)
    std_c = []
    ub_rows = []  # (std column, shifted upper bound)
    ncol = 0
    for j, (lo, hi) in enumerate(bounds):
        if lo is None and hi is None:
            terms.append([(ncol, 1.0), (ncol + 1, -1.0)])
            std_c.extend([c[j], -c[j]])
            ncol += 2
        elif lo is None:
            # x = hi - t with t >= 0
            terms.append([(ncol, -1.0)])
            offsets[j] = float(hi)
            std_c.append(-c[j])
            ncol += 1
        else:
            terms.append([(ncol, 1.0)])
            offsets[j] = float(lo)
            std_c.append(c[j])
            ncol += 1
            if hi is not None:
                if float(hi) < float(lo):
                    raise ValueError(f"bounds of variable {j} are empty")
                ub_rows.append((ncol - 1, float(hi) - float(lo)))

    const = float(c @ offsets)
    std_rows = []
    for coeffs, rel, rhs in lp.rows:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size != n:
            raise ValueError("constraint row length differs from objective length")
        if rel not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {rel!r}")
        row = np.zeros(ncol)
        b = float(rhs) - float(coeffs @ offsets)
        for j in range(n):
            if coeffs[j] == 0.0:
                continue
            for col, sign in terms[j]:
                row[col] += coeffs[j] * sign
        std_rows.append((row, rel, b))
    n_user = len(std_rows)
    for col, ub in ub_rows:
        row = np.zeros(ncol)
        row[col] = 1.0
        std_rows.append((row, "<=", ub))
    return np.array(std_c), const, std_rows, n_user, terms, offsets


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _simplex(T, basis, cvec, allowed, max_pivots):
    """Bland's-rule simplex on a canonical tableau ``[A | b]``.

    Returns "optimal" or "unbounded"; the tableau and basis are updated in
    place.
    """
    m = T.shape[0]
    for _ in range(max_pivots):
        cb = cvec[basis]
        reduced = cvec - cb @ T[:, :-1]
        reduced[~allowed] = 0.0
        entering = -1
        for j in np.nonzero(reduced > _PIVOT_TOL)[0]:
            entering = int(j)
            break
        if entering < 0:
            return "optimal"
        col = T[:, entering]
        ratios = np.full(m, np.inf)
        mask = col > _PIVOT_TOL
        ratios[mask] = T[mask, -1] / col[mask]
        best = ratios.min()
        if not np.isfinite(best):
            return "unbounded"
        # among tied rows, leave the basic variable with the smallest index
        tied = np.nonzero(ratios <= best + _PIVOT_TOL)[0]
        leave = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, basis, leave, entering)
    raise SolverError(f"simplex exceeded {max_pivots} pivots")


def solve_lp(lp: LinearProgram, max_pivots: int = 50000) -> LpResult:
    """Solve a small dense LP; infeasible and unbounded are distinct outcomes."""
    std_c, const, std_rows, n_user, terms, offsets = _standardize(lp)
    ncol = std_c.size
    m = len(std_rows)

    if m == 0:
        # only bounds; optimum at a bound vertex
        x = np.zeros(len(terms))
        for j, (lo, hi) in enumerate(lp.bounds or [(0.0, None)] * len(terms)):
            cj = float(np.asarray(lp.objective, dtype=float)[j])
            if cj > 0:
                if hi is None:
                    return LpResult(status="unbounded")
                x[j] = hi
            else:
                if lo is None and cj < 0:
                    return LpResult(status="unbounded")
                x[j] = 0.0 if lo is None else lo
        return LpResult(status="optimal", value=float(np.asarray(lp.objective) @ x), x=x,
                        duals=np.zeros(0))

    flips = np.ones(m)
    nslack = sum(1 for _, rel, _ in std_rows if rel != "=")
    nart = sum(1 for _, rel, _ in std_rows if rel != "<=")
    width = ncol + nslack + nart
    T = np.zeros((m, width + 1))
    basis = np.zeros(m, dtype=int)
    seed_col = np.zeros(m, dtype=int)
    art_cols = []
    s_at = ncol
    a_at = ncol + nslack
    for i, (row, rel, b) in enumerate(std_rows):
        if b < 0:
            row, b = -row, -b
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
            flips[i] = -1.0
        T[i, :ncol] = row
        T[i, -1] = b
        if rel == "<=":
            T[i, s_at] = 1.0
            basis[i] = s_at
            seed_col[i] = s_at
            s_at += 1
        elif rel == ">=":
            T[i, s_at] = -1.0
            s_at += 1
            T[i, a_at] = 1.0
            basis[i] = a_at
            seed_col[i] = a_at
            art_cols.append(a_at)
            a_at += 1
        else:
            T[i, a_at] = 1.0
            basis[i] = a_at
            seed_col[i] = a_at
            art_cols.append(a_at)
            a_at += 1

    art_mask = np.zeros(width, dtype=bool)
    art_mask[art_cols] = True

    # phase 1: drive the artificial variables to zero
    if art_cols:
        c1 = np.zeros(width)
        c1[art_cols] = -1.0
        allowed = np.ones(width, dtype=bool)
        status = _simplex(T, basis, c1, allowed, max_pivots)
        if status == "unbounded":  # cannot happen: phase-1 objective <= 0
            raise SolverError("phase-1 simplex reported unbounded")
        art_value = sum(T[i, -1] for i in range(m) if art_mask[basis[i]])
        if art_value > _FEAS_TOL:
            return LpResult(status="infeasible")
        # pivot remaining (degenerate) artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if not art_mask[basis[i]]:
                continue
            pivoted = False
            for j in range(width):
                if not art_mask[j] and abs(T[i, j]) > _PIVOT_TOL:
                    _pivot(T, basis, i, j)
                    pivoted = True
                    break
            if not pivoted:
                keep[i] = False  # redundant constraint
        if not keep.all():
            T = T[keep]
            basis = basis[keep]
            seed_col = seed_col[keep]
            flips = flips[keep]
            row_alive = keep
        else:
            row_alive = keep
        m = T.shape[0]
    else:
        row_alive = np.ones(m, dtype=bool)

    # phase 2
    c2 = np.zeros(width)
    c2[:ncol] = std_c
    allowed = ~art_mask
    status = _simplex(T, basis, c2, allowed, max_pivots)
    if status == "unbounded":
        return LpResult(status="unbounded")

    t = np.zeros(width)
    t[basis] = T[:, -1]
    nvars = len(terms)
    x = offsets.copy()
    for j in range(nvars):
        for col, sign in terms[j]:
            x[j] += sign * t[col]
    value = float(np.asarray(lp.objective, dtype=float) @ x)

    # duals: z at the seed (identity) column of each surviving row, times
    # the sign flip applied during normalization; dropped rows get 0
    cb = c2[basis]
    z_seed = cb @ T[:, :-1][:, seed_col]
    duals_std = np.zeros(len(std_rows))
    duals_std[np.nonzero(row_alive)[0]] = z_seed * flips
    duals = duals_std[:n_user]

    viol = 0.0
    for coeffs, rel, rhs in lp.rows:
        lhs = float(np.asarray(coeffs, dtype=float) @ x)
        rhs = float(rhs)
        scale = max(1.0, abs(rhs))
        if rel == "<=":
            viol = max(viol, (lhs - rhs) / scale)
        elif rel == ">=":
            viol = max(viol, (rhs - lhs) / scale)
        else:
            viol = max(viol, abs(lhs - rhs) / scale)
    if viol > 10 * _FEAS_TOL:
        raise SolverError(f"simplex solution violates feasibility by {viol:.3e}")
    return LpResult(status="optimal", value=value, x=x, duals=duals, max_violation=viol)


@dataclass
class MatrixGame:
    """Zero-sum game; rows maximize, columns minimize the payoff."""

    payoff: np.ndarray

    def __post_init__(self):
        self.payoff = np.asarray(self.payoff, dtype=float)
        if self.payoff.ndim != 2 or self.payoff.size == 0:
            raise ValueError("payoff must be a nonempty 2-D matrix")
        if not np.isfinite(self.payoff).all():
            raise ValueError("payoff entries must be finite")


@dataclass
class GameSolution:
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    row_value: float = 0.0  # guaranteed payoff of the row mix
    col_value: float = 0.0  # guaranteed payoff of the column mix


def _row_lp(A):
    R, C = A.shape
    obj = np.zeros(R + 1)
    obj[R] = 1.0
    rows = []
    for cidx in range(C):
        coeffs = np.zeros(R + 1)
        coeffs[:R] = A[:, cidx]
        coeffs[R] = -1.0
        rows.append((coeffs, ">=", 0.0))
    total = np.zeros(R + 1)
    total[:R] = 1.0
    rows.append((total, "=", 1.0))
    bounds = [(0.0, None)] * R + [(None, None)]
    return LinearProgram(obj, rows, bounds)


def _col_lp(A):
    R, C = A.shape
    obj = np.zeros(C + 1)
    obj[C] = -1.0  # maximize -w, i.e. minimize w
    rows = []
    for ridx in range(R):
        coeffs = np.zeros(C + 1)
        coeffs[:C] = A[ridx, :]
        coeffs[C] = -1.0
        rows.append((coeffs, "<=", 0.0))
    total = np.zeros(C + 1)
    total[:C] = 1.0
    rows.append((total, "=", 1.0))
    bounds = [(0.0, None)] * C + [(None, None)]
    return LinearProgram(obj, rows, bounds)


def solve_matrix_game(game, tol: float = 1e-9) -> GameSolution:
    """Optimal mixed strategies of a finite zero-sum game via the LP reduction.

    The column strategy is read off the duals of the row player's LP; if the
    recovered mix fails its guarantee check the column LP is solved
    explicitly instead.
    """
    if not isinstance(game, MatrixGame):
        game = MatrixGame(np.asarray(game, dtype=float))
    A = game.payoff
    R, C = A.shape

    res = solve_lp(_row_lp(A))
    if res.status != "optimal":
        raise SolverError(f"matrix-game row LP came back {res.status}")
    p = np.clip(res.x[:R], 0.0, None)
    p /= p.sum()
    value = float(res.value)

    q = np.clip(-res.duals[:C], 0.0, None)
    qsum = q.sum()
    good = False
    if qsum > tol:
        q = q / qsum
        col_value = float((A @ q).max())
        good = col_value <= value + 1e-7
    if not good:
        cres = solve_lp(_col_lp(A))
        if cres.status != "optimal":
            raise SolverError(f"matrix-game column LP came back {cres.status}")
        q = np.clip(cres.x[:C], 0.0, None)
        q /= q.sum()
        col_value = float((A @ q).max())

    row_value = float((p @ A).min())
    if col_value - row_value > 1e-6:
        raise SolverError(
            f"matrix-game duality gap {col_value - row_value:.3e} exceeds tolerance"
        )
    return GameSolution(value=value, row_strategy=p, col_strategy=q,
                        row_value=row_value, col_value=col_value)
