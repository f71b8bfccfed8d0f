"""Two-phase tableau simplex: Dantzig pricing, Bland's rule on degenerate stretches.

:class:`StandardSimplex` solves ``min c.x  s.t.  A x = b, x >= 0`` and can be
resumed after new columns are appended, which is what the cutting-plane
solver needs.  :func:`simplex_solve` wraps it for general LPs with
inequalities and free variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
STALLED = "stalled"
HARRIS_DELTA = 1e-9  # primal feasibility slack of the two-pass ratio test
BLAND_AFTER = 10  # consecutive degenerate pivots before switching to Bland's rule
REPAIR_ROUNDS = 5  # refactor-and-repair passes after the primal phase
REPAIR_TOL = 1e-9


@dataclass
class LinearProgram:
    """``min c.x`` subject to ``A_eq x = b_eq``, ``G x <= h``.

    Variables are nonnegative unless flagged in ``free``.
    """

    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    G: np.ndarray | None = None
    h: np.ndarray | None = None
    free: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A_eq = np.zeros((0, n)) if self.A_eq is None else np.atleast_2d(np.asarray(self.A_eq, dtype=float))
        self.b_eq = np.zeros(0) if self.b_eq is None else np.asarray(self.b_eq, dtype=float).reshape(-1)
        self.G = np.zeros((0, n)) if self.G is None else np.atleast_2d(np.asarray(self.G, dtype=float))
        self.h = np.zeros(0) if self.h is None else np.asarray(self.h, dtype=float).reshape(-1)
        self.free = np.zeros(n, dtype=bool) if self.free is None else np.asarray(self.free, dtype=bool)
        if self.A_eq.shape != (self.b_eq.size, n) or self.G.shape != (self.h.size, n) or self.free.size != n:
            raise ValueError("inconsistent LP dimensions")
        for arr in (self.c, self.A_eq, self.b_eq, self.G, self.h):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")


@dataclass
class LPSolution:
    x: np.ndarray | None
    value: float
    status: str
    iterations: int
    eq_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ineq_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    farkas: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class StandardSimplex:
    """Tableau simplex for ``min c.x, A x = b, x >= 0``.

    After :meth:`solve` the object keeps its basis, so :meth:`add_columns`
    followed by :meth:`solve` warm-starts phase 2 from the previous optimum.
    """

    def __init__(self, A, b, c, tol: float = 1e-9, max_pivots: int = 50_000):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        self.m0 = A.shape[0]
        sign = np.where(b < 0, -1.0, 1.0)
        self.row_sign = sign
        self.A = A * sign[:, None]
        self.b = b * sign
        self.c = np.asarray(c, dtype=float).reshape(-1).copy()
        self.rows = np.arange(self.m0)
        # every row, kept so that rows dropped as redundant can come back
        self._A_all, self._b_all, self._sign_all = self.A, self.b, sign
        self.tol = tol
        self.max_pivots = max_pivots  # per call of solve()
        self.pivots = 0  # cumulative over all calls
        self._budget_end = max_pivots
        self.basis: list[int] | None = None
        self.status: str | None = None
        self.farkas: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.A.shape[1]

    # -- tableau helpers -------------------------------------------------
    def _refactor(self, A, b, cost, basis):
        B = A[:, basis]
        binv = np.linalg.inv(B)
        body = binv @ A
        rhs = binv @ b
        rhs[np.abs(rhs) < 1e-13] = 0.0
        reduced = cost - cost[basis] @ body
        tab = np.zeros((A.shape[0] + 1, A.shape[1] + 1))
        tab[:-1, :-1] = body
        tab[:-1, -1] = rhs
        tab[-1, :-1] = reduced
        tab[-1, -1] = -cost[basis] @ rhs
        return tab

    def _pivot(self, tab, row, col):
        tab[row] /= tab[row, col]
        col_vals = tab[:, col].copy()
        col_vals[row] = 0.0
        tab -= np.outer(col_vals, tab[row])

    def _iterate(self, tab, basis, allowed: int, data) -> str:
        """Primal pivots on ``tab`` over the first ``allowed`` columns."""
        m = len(basis)
        scale = 1.0 + np.max(np.abs(tab[-1, :allowed]), initial=0.0)
        since_refactor = 0
        degenerate_run = 0
        while True:
            reduced = tab[-1, :allowed].copy()
            reduced[basis] = 0.0  # basic columns price out exactly; ignore round-off
            cand = np.flatnonzero(reduced < -self.tol * scale)
            if cand.size == 0:
                return OPTIMAL
            if self.pivots >= self._budget_end:
                return STALLED
            # Dantzig pricing; Bland's rule while pivots keep being degenerate
            bland = degenerate_run >= BLAND_AFTER
            col = int(cand[0]) if bland else int(cand[np.argmin(reduced[cand])])
            column = tab[:m, col]
            pos = np.flatnonzero(column > self.tol)
            if pos.size == 0:
                return UNBOUNDED
            # round-off can leave basics at -1e-14; treat them as degenerate zeros
            rhs = np.maximum(tab[pos, -1], 0.0)
            ratios = rhs / column[pos]
            if bland:
                best = ratios.min()
                ties = pos[ratios <= best + 1e-12 * (1.0 + abs(best))]
                row = int(min(ties, key=lambda r: basis[r]))
            else:
                # Harris: relax the step bound slightly, then take the largest pivot under it
                bound = np.min((rhs + HARRIS_DELTA) / column[pos])
                ok = pos[ratios <= bound]
                row = int(ok[np.argmax(column[ok])])
                best = ratios[np.searchsorted(pos, row)]
            degenerate_run = degenerate_run + 1 if best <= 1e-12 else 0
            # a round-off negative RHS over a small pivot would step backwards
            tab[row, -1] = max(tab[row, -1], 0.0)
            self._pivot(tab, row, col)
            basis[row] = col
            self.pivots += 1
            since_refactor += 1
            if since_refactor >= 200:
                tab[:] = self._refactor(*data, basis)
                since_refactor = 0

    # -- public ---------------------------------------------------------
    def solve(self) -> str:
        self._budget_end = self.pivots + self.max_pivots
        if self.basis is None:
            self.status = self._phase_one()
            if self.status != OPTIMAL:
                return self.status
        data = (self.A, self.b, self.c)
        tab = self._refactor(*data, self.basis)
        self.status = self._iterate(tab, self.basis, self.n, data)
        # the running tableau drifts on ill-conditioned bases: recheck on a fresh
        # factorisation and repair primal infeasibility with dual pivots
        for _ in range(REPAIR_ROUNDS):
            if self.status != OPTIMAL:
                break
            tab = self._refactor(*data, self.basis)
            if tab[:-1, -1].min() >= -REPAIR_TOL * (1.0 + np.abs(self.b).max(initial=0.0)):
                break
            if not self._dual_repair(tab, self.basis):
                break
            self.status = self._iterate(tab, self.basis, self.n, data)
        self._tab = tab
        return self.status

    def _dual_repair(self, tab, basis) -> bool:
        """Dual simplex pivots until the RHS is nonnegative; ``False`` if stuck."""
        floor = -REPAIR_TOL * (1.0 + np.abs(self.b).max(initial=0.0))
        while True:
            row = int(np.argmin(tab[:-1, -1]))
            if tab[row, -1] >= floor:
                return True
            if self.pivots >= self._budget_end:
                return False
            line = tab[row, :-1].copy()
            line[basis] = 0.0
            cand = np.flatnonzero(line < -1e-9)
            if cand.size == 0:
                return False
            reduced = np.maximum(tab[-1, cand], 0.0)
            col = int(cand[np.argmin(reduced / -line[cand])])
            self._pivot(tab, row, col)
            basis[row] = col
            self.pivots += 1

    def _phase_one(self) -> str:
        m, n = self.A.shape
        A1 = np.hstack([self.A, np.eye(m)])
        cost1 = np.concatenate([np.zeros(n), np.ones(m)])
        basis = list(range(n, n + m))
        data = (A1, self.b, cost1)
        tab = self._refactor(*data, basis)
        status = self._iterate(tab, basis, n + m, data)
        if status == STALLED:
            return STALLED
        infeas = -tab[-1, -1]
        if infeas > 1e-8 * (1.0 + np.max(np.abs(self.b), initial=0.0)):
            # Farkas certificate: y with y.A <= 0 (on original columns) and y.b > 0
            self.farkas = (np.ones(m) - tab[-1, n : n + m]) * self.row_sign
            return INFEASIBLE
        # drive remaining artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= n:
                row = np.abs(tab[r, :n])
                row[[bj for bj in basis if bj < n]] = 0.0
                j = int(np.argmax(row))
                if row[j] > 1e-7:
                    self._pivot(tab, r, j)
                    basis[r] = j
                else:
                    keep[r] = False
        if not keep.all():
            self.A = self.A[keep]
            self.b = self.b[keep]
            self.row_sign = self.row_sign[keep]
            self.rows = self.rows[keep]
            basis = [bj for bj, k in zip(basis, keep) if k]
        self.basis = basis
        return OPTIMAL

    def add_columns(self, cols, costs):
        """Append columns, shape ``(m, k)`` in the original row order; keeps the basis."""
        cols = np.asarray(cols, dtype=float).reshape(self.m0, -1) * self._sign_all[:, None]
        self._A_all = np.hstack([self._A_all, cols])
        if self.rows.size < self.m0:
            # a row judged redundant may not be redundant for the new columns:
            # restore all rows and redo phase one on the next solve
            self.A, self.b, self.row_sign = self._A_all, self._b_all, self._sign_all
            self.rows = np.arange(self.m0)
            self.basis = None
        else:
            self.A = self._A_all
        self.c = np.concatenate([self.c, np.asarray(costs, dtype=float).reshape(-1)])

    @property
    def x(self) -> np.ndarray:
        x = np.zeros(self.n)
        tab = self._tab
        x[self.basis] = tab[:-1, -1]
        return np.clip(x, 0.0, None)

    @property
    def value(self) -> float:
        return float(self.c @ self.x)

    @property
    def duals(self) -> np.ndarray:
        """Row multipliers ``y`` with ``c - A^T y >= 0`` at optimality (original row order)."""
        B = self.A[:, self.basis]
        y_kept = np.linalg.solve(B.T, self.c[self.basis])
        y = np.zeros(self.m0)
        y[self.rows] = y_kept * self.row_sign
        return y


def simplex_solve(lp: LinearProgram, tol: float = 1e-9, max_pivots: int = 50_000) -> LPSolution:
    """Solve a general LP by conversion to standard form.

    Free variables are split, inequality rows get slacks.  The duals
    ``y = eq_duals`` and ``lam = ineq_duals >= 0`` satisfy
    ``c - A_eq^T y + G^T lam >= 0`` (with equality on free variables) and,
    at an optimum, ``b_eq.y - h.lam`` equals the primal value.
    """
    n = lp.c.size
    free_idx = np.flatnonzero(lp.free)
    ni = lp.h.size
    neq = lp.b_eq.size
    # standard-form column order: x (n), x_minus for free vars, slacks
    cols_eq = np.hstack([lp.A_eq, -lp.A_eq[:, free_idx], np.zeros((neq, ni))])
    cols_in = np.hstack([lp.G, -lp.G[:, free_idx], np.eye(ni)])
    A = np.vstack([cols_eq, cols_in])
    b = np.concatenate([lp.b_eq, lp.h])
    c = np.concatenate([lp.c, -lp.c[free_idx], np.zeros(ni)])
    if A.shape[0] == 0:
        # no constraints at all
        if np.any(lp.c[~lp.free] < 0) or np.any(lp.c[lp.free] != 0):
            return LPSolution(None, -np.inf, UNBOUNDED, 0)
        return LPSolution(np.zeros(n), 0.0, OPTIMAL, 0)
    solver = StandardSimplex(A, b, c, tol=tol, max_pivots=max_pivots)
    status = solver.solve()
    if status == INFEASIBLE:
        return LPSolution(None, np.inf, INFEASIBLE, solver.pivots, farkas=solver.farkas)
    if status != OPTIMAL:
        return LPSolution(None, -np.inf if status == UNBOUNDED else np.nan, status, solver.pivots)
    z = solver.x
    x = z[:n].copy()
    x[free_idx] -= z[n : n + free_idx.size]
    y = solver.duals
    return LPSolution(
        x=x,
        value=float(lp.c @ x),
        status=OPTIMAL,
        iterations=solver.pivots,
        eq_duals=y[:neq],
        ineq_duals=-y[neq:],
    )
