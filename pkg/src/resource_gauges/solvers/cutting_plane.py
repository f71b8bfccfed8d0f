"""Eigenvector cutting planes for LPs with small PSD constraints.

The problem is ``min c.x`` over a base LP plus constraints
``M_j(x) = F0_j + sum_i x_i F_ij  >= 0`` (PSD).  Every round solves the LP
relaxation, eigendecomposes each block, and adds ``<w w^*, M_j(x)> >= 0``
for every eigenvector ``w`` with eigenvalue below ``-eps_psd``.

Cuts enter as new columns of the LP dual, so each round warm-starts the
simplex from the previous basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .simplex import INFEASIBLE, OPTIMAL, STALLED, UNBOUNDED, LinearProgram, StandardSimplex


@dataclass
class PSDBlock:
    """Affine Hermitian map ``x -> F0 + sum_i x_i F[i]``."""

    F0: np.ndarray
    F: np.ndarray  # shape (n, d, d)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.F0 + np.tensordot(x, self.F, axes=1)

    def cut_row(self, w: np.ndarray) -> tuple[np.ndarray, float]:
        """Coefficients ``g, h`` of the cut ``g.x <= h`` equivalent to ``<w|M(x)|w> >= 0``."""
        wc = w.conj()
        coeffs = np.einsum("i,kij,j->k", wc, self.F, w).real
        const = float((wc @ self.F0 @ w).real)
        return -coeffs, const


@dataclass
class CutRecord:
    vectors: list[np.ndarray] = field(default_factory=list)
    blocks: list[int] = field(default_factory=list)
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_eigenvalue: float = -np.inf

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class CuttingPlaneResult:
    status: str
    x: np.ndarray | None
    lower: float
    upper: float
    x_feasible: np.ndarray | None
    cuts: CutRecord
    rounds: int
    lower_history: list[float]
    pivots: int

    @property
    def value(self) -> float:
        return self.lower


def _restore(x, blocks, direction, lp):
    """Shift ``x`` along ``direction`` by the least amount making every block PSD.

    ``direction`` may instead be a callable mapping ``x`` to a feasible
    point (or ``None``).
    """
    if direction is None:
        return None
    if callable(direction):
        return direction(x)
    t = 0.0
    for blk in blocks:
        shift = np.tensordot(direction, blk.F, axes=1)
        w, v = np.linalg.eigh(0.5 * (shift + shift.conj().T))
        if w[0] <= 1e-12:
            return None
        root = (v / np.sqrt(w)) @ v.conj().T
        m = blk(x)
        lam = np.linalg.eigvalsh(root @ (0.5 * (m + m.conj().T)) @ root)[0]
        t = max(t, -lam)
    xf = x + t * direction
    if lp.A_eq.size and np.max(np.abs(lp.A_eq @ xf - lp.b_eq)) > 1e-7:
        return None
    if lp.G.size and np.max(lp.G @ xf - lp.h) > 1e-7:
        return None
    return xf


def cutting_plane_psd(
    lp: LinearProgram,
    blocks: list[PSDBlock],
    eps_psd: float | None = None,
    max_rounds: int = 500,
    restore=None,
    gap_tol: float | None = None,
    dedup_tol: float = 1e-10,
    initial_cuts: list[tuple[int, np.ndarray]] | None = None,
) -> CuttingPlaneResult:
    """Minimise ``lp.c @ x`` subject to ``lp`` and PSD ``blocks``.

    The base ``lp`` must be bounded on its own.  ``lower`` is the LP value of
    the cut model; ``upper`` comes from pushing the last LP point along
    the direction ``restore`` until every block is PSD, or from calling
    ``restore(x)`` when it is a function (``inf`` when neither is given).
    The loop stops once all blocks are above ``-eps_psd``, once
    ``upper - lower <= gap_tol * (1 + |lower|)``, or after
    ``max_rounds`` (status ``"max_rounds"``).
    """
    n = lp.c.size
    if eps_psd is None:
        scale = max(np.linalg.norm(b.F0) for b in blocks) if blocks else 0.0
        eps_psd = 1e-8 * (1.0 + scale)
    free = lp.free
    neq = lp.b_eq.size
    # dual LP in standard form; rows = primal variables
    cols = [lp.A_eq.T, -lp.A_eq.T, -lp.G.T, np.eye(n)[:, ~free]]
    costs = [-lp.b_eq, lp.b_eq, lp.h, np.zeros(int((~free).sum()))]
    n_fixed = 2 * neq
    cut_start = 2 * neq + lp.h.size + int((~free).sum())
    dual = StandardSimplex(np.hstack(cols), lp.c, np.concatenate(costs))
    # base inequality columns sit between the equality pairs and the slacks;
    # cut columns are appended after everything
    record = CutRecord()
    stored = [np.zeros((0, blk.F0.shape[0]), dtype=complex) for blk in blocks]
    history: list[float] = []
    status = "max_rounds"
    x = None
    upper = np.inf
    x_feas = None
    lower = -np.inf
    multipliers = np.zeros(0)
    # running mean of the LP points on the current plateau of the lower bound;
    # lambda_min is concave, so the mean is closer to feasible than any vertex
    plateau_sum, plateau_count, plateau_level = None, 0, -np.inf

    def add_cut(j, w):
        g, hval = blocks[j].cut_row(w)
        dual.add_columns(-g.reshape(n, 1), [hval])
        record.vectors.append(w)
        record.blocks.append(j)
        stored[j] = np.vstack([stored[j], w.conj()[None, :]])

    for j, w in initial_cuts or []:
        add_cut(j, np.asarray(w, dtype=complex) / np.linalg.norm(w))

    rounds = 0
    for rounds in range(1, max_rounds + 1):
        st = dual.solve()
        if st == INFEASIBLE:
            # dual infeasible: primal relaxation unbounded (or infeasible)
            status = UNBOUNDED
            break
        if st == UNBOUNDED:
            status = INFEASIBLE
            break
        if st == STALLED:
            status = STALLED
            break
        x = -dual.duals
        x[~free] = np.clip(x[~free], 0.0, None)
        multipliers = dual.x[cut_start:].copy()
        lower = -dual.value
        if history and lower < history[-1]:
            # round-off only; the cut model only grows
            lower = history[-1]
        history.append(lower)
        if lower > plateau_level + 1e-12 * (1.0 + abs(lower)):
            plateau_sum, plateau_count, plateau_level = np.zeros_like(x), 0, lower
        plateau_sum += x
        plateau_count += 1
        min_eig = np.inf
        new = []
        for j, blk in enumerate(blocks):
            m = blk(x)
            w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
            min_eig = min(min_eig, w[0])
            for k in np.flatnonzero(w < -eps_psd):
                new.append((j, v[:, k]))
        record.min_eigenvalue = float(min_eig)
        points = [x] if plateau_count < 2 else [x, plateau_sum / plateau_count]
        for p in points:
            cand = _restore(p, blocks, restore, lp)
            if cand is not None and lp.c @ cand < upper:
                upper = float(lp.c @ cand)
                x_feas = cand
        if not new:
            status = OPTIMAL
            if upper > lower and min_eig >= 0:
                upper, x_feas = lower, x
            break
        if gap_tol is not None and upper - lower <= gap_tol * (1.0 + abs(lower)):
            status = OPTIMAL
            break
        added = 0
        for j, w in new:
            if stored[j].shape[0] and np.max(np.abs(stored[j] @ w)) > 1.0 - dedup_tol:
                continue
            add_cut(j, w)
            added += 1
        if added == 0:
            status = STALLED
            break
    # multipliers of the last LP solved to optimality, padded for cuts added since
    record.multipliers = np.concatenate([multipliers, np.zeros(len(record) - multipliers.size)])
    return CuttingPlaneResult(
        status=status,
        x=x,
        lower=float(lower),
        upper=float(upper),
        x_feasible=x_feas,
        cuts=record,
        rounds=rounds,
        lower_history=history,
        pivots=dual.pivots,
    )
