"""Small dense two-phase simplex solver with anti-cycling safeguards.

Solves   min c @ x   s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
in double precision.  Meant for the desk-scale certificate and counting
problems in this package (hundreds of rows), not as a general-purpose code.

Degeneracy handling: the right-hand side is perturbed by a tiny seeded
positive amount, which breaks ties (so the stabilized largest-pivot ratio
rule terminates), and the returned vertex is re-solved on the final basis
against the unperturbed data, so the perturbation never reaches the caller.
A Bland least-index tail and a pivot-count guard remain as backstops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPFailure", "SimplexResult", "simplex_solve"]

PIVOT_TOL = 1e-9
#: Relative size of the anti-degeneracy rhs perturbation.  Must stay well
#: above the ratio-test tie band so the perturbation actually orders ties.
PERTURB = 3e-10
_TIE_BAND = 1e-12
#: Consecutive degenerate pivots before switching to the pure Bland rule.
_STALL_SWITCH = 500


class LPFailure(RuntimeError):
    """The pivot-count guard was exceeded (cycling or numerical trouble)."""


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col


def _run(tableau: np.ndarray, basis: np.ndarray, ncols: int, max_pivots: int) -> tuple[str, int]:
    """Drive the objective row (last) to optimality.

    Entering variable: least index with negative reduced cost (Bland).
    Leaving variable: among minimal-ratio rows the largest pivot element for
    numerical stability; after a long degenerate stall the least-basis-index
    rule (full Bland) takes over to break any residual cycle.
    """
    iters = 0
    stall = 0
    last_rhs = tableau[-1, -1]
    while True:
        negative = np.nonzero(tableau[-1, :ncols] < -PIVOT_TOL)[0]
        if negative.size == 0:
            return "optimal", iters
        entering = int(negative[0])
        col = tableau[:-1, entering]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            return "unbounded", iters
        ratios = tableau[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + _TIE_BAND * max(1.0, abs(best))]
        if stall >= _STALL_SWITCH:
            leave = ties[np.argmin(basis[ties])]
        else:
            leave = ties[np.argmax(col[ties])]
        _pivot(tableau, basis, int(leave), entering)
        iters += 1
        if iters > max_pivots:
            raise LPFailure(f"pivot guard exceeded ({max_pivots})")
        rhs = tableau[-1, -1]
        stall = stall + 1 if abs(rhs - last_rhs) <= 1e-12 * max(1.0, abs(last_rhs)) else 0
        last_rhs = rhs


def simplex_solve(
    c: np.ndarray,
    a_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    max_pivots: int | None = None,
) -> SimplexResult:
    """Two-phase dense simplex for nonnegative variables."""
    c = np.asarray(c, float)
    n = c.size
    rows = []
    rhs = []
    n_ub = 0
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, float))
        b_ub = np.atleast_1d(np.asarray(b_ub, float))
        n_ub = a_ub.shape[0]
        rows.append(a_ub)
        rhs.append(b_ub)
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, float))
        b_eq = np.atleast_1d(np.asarray(b_eq, float))
        rows.append(a_eq)
        rhs.append(b_eq)
    if not rows:
        raise ValueError("LP needs at least one constraint")
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    m = a.shape[0]

    # Slack columns for the inequality rows; flip rows to make b >= 0.
    slack = np.zeros((m, n_ub))
    for i in range(n_ub):
        slack[i, i] = 1.0
    full = np.hstack([a, slack])
    neg = b < 0
    full[neg] *= -1.0
    b = np.where(neg, -b, b)

    # Anti-degeneracy: tiny positive seeded perturbation of the rhs.
    rng = np.random.default_rng(0x5EED)
    scale = PERTURB * max(1.0, float(np.max(b)) if b.size else 1.0)
    b_pert = b + scale * (1.0 + rng.random(m))

    basis = np.full(m, -1, dtype=int)
    art_rows = []
    for i in range(m):
        if i < n_ub and not neg[i]:
            basis[i] = n + i  # slack starts basic
        else:
            art_rows.append(i)
    n_slack = n_ub
    n_art = len(art_rows)
    art = np.zeros((m, n_art))
    for j, i in enumerate(art_rows):
        art[i, j] = 1.0
        basis[i] = n + n_slack + j
    ncols = n + n_slack + n_art

    tableau = np.zeros((m + 1, ncols + 1))
    tableau[:m, : n + n_slack] = full
    tableau[:m, n + n_slack : ncols] = art
    tableau[:m, -1] = b_pert
    if max_pivots is None:
        max_pivots = 200 * (m + ncols) + 1000

    total_iters = 0
    if n_art:
        # Phase 1: minimize the sum of artificials.
        tableau[-1, n + n_slack : ncols] = 1.0
        for i in art_rows:
            tableau[-1] -= tableau[i]
        status, iters = _run(tableau, basis, ncols, max_pivots)
        total_iters += iters
        feas_tol = 1e-8 * max(1.0, float(np.abs(b).sum()))
        if status != "optimal":
            # Phase 1 is bounded below by zero; an "unbounded" report means a
            # numerically dead column.  Accept the basis if already feasible.
            if -tableau[-1, -1] > feas_tol:
                raise LPFailure("phase 1 stalled on a numerically zero column")
        elif -tableau[-1, -1] > feas_tol:
            return SimplexResult("infeasible", None, None, total_iters)
        # Drive surviving artificials out of the basis.
        for i in range(m):
            if basis[i] >= n + n_slack:
                row = tableau[i, : n + n_slack]
                cols = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
                if cols.size:
                    _pivot(tableau, basis, i, int(cols[0]))
                    total_iters += 1
                # else: redundant row, keep the degenerate artificial at zero.
        tableau[:, n + n_slack : ncols] = 0.0  # block re-entry

    # Phase 2 objective row: reduced costs of c under the current basis.
    obj = np.zeros(ncols + 1)
    obj[:n] = c
    tableau[-1] = obj
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            tableau[-1] -= c[basis[i]] * tableau[i]
    status, iters = _run(tableau, basis, n + n_slack, max_pivots)
    total_iters += iters
    if status == "unbounded":
        return SimplexResult("unbounded", None, None, total_iters)

    # Undo the perturbation: exact basic solution of the original system.
    cols_all = np.hstack([full, art])
    x_basis = None
    try:
        x_basis = np.linalg.solve(cols_all[:, basis], b)
    except np.linalg.LinAlgError:
        pass
    if x_basis is None or np.min(x_basis) < -1e-7 * max(1.0, scale / PERTURB):
        x_basis = tableau[:m, -1]  # fall back to the perturbed vertex
    x = np.zeros(ncols)
    x[basis] = np.maximum(x_basis, 0.0)
    x = x[:n]
    return SimplexResult("optimal", x, float(c @ x), total_iters)
