"""Complex l1 minimisation under affine constraints.

``min sum_i |x_i|  s.t.  A x = b`` over complex ``x``, solved by ADMM with
complex soft-thresholding.  The dual problem
``max Re<y, b>  s.t.  ||A^* y||_inf <= 1`` supplies a lower bound, so every
result carries a certified gap.  Once ADMM is close, a phase column
generation LP seeded by the iterate finishes the job to LP accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simplex import StandardSimplex

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
MAX_ITER = "max_iter"
POLISH_LP_TOL = 1e-11  # reduced-cost tolerance of the polish LP; its duals feed the lower bound


@dataclass
class AffineL1Problem:
    """Row-reduced form ``Q^* x = c`` of ``A x = b`` with orthonormal ``Q`` columns."""

    Q: np.ndarray
    c: np.ndarray
    n: int

    @classmethod
    def from_system(cls, A, b, rank_tol: float = 1e-10) -> "AffineL1Problem":
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        b = np.asarray(b, dtype=complex).reshape(-1)
        u, s, vh = np.linalg.svd(A, full_matrices=False)
        keep = s > rank_tol * max(s[0] if s.size else 0.0, 1.0)
        u, s, vh = u[:, keep], s[keep], vh[keep]
        resid = b - u @ (u.conj().T @ b)
        if np.linalg.norm(resid) > 1e-8 * (1.0 + np.linalg.norm(b)):
            raise InfeasibleL1("right-hand side is not in the range of the constraint map")
        c = (u.conj().T @ b) / s
        return cls(Q=vh.conj().T, c=c, n=A.shape[1])

    def project(self, v: np.ndarray) -> np.ndarray:
        return v - self.Q @ (self.Q.conj().T @ v - self.c)

    def dual_bound(self, lam: np.ndarray) -> tuple[float, np.ndarray]:
        """Lower bound from a (possibly infeasible) multiplier ``lam`` in C^n."""
        w = self.Q.conj().T @ lam
        g = self.Q @ w
        scale = np.max(np.abs(g), initial=0.0)
        if scale <= 0:
            return 0.0, w
        w = w / scale
        return float(abs(np.vdot(w, self.c))), w


class InfeasibleL1(ValueError):
    pass


@dataclass
class L1Result:
    x: np.ndarray
    value: float
    lower: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float
    polished: bool = False

    @property
    def gap(self) -> float:
        return self.value - self.lower


def soft_threshold(v: np.ndarray, kappa: float) -> np.ndarray:
    mag = np.abs(v)
    scale = np.where(mag > kappa, 1.0 - kappa / np.where(mag > 0, mag, 1.0), 0.0)
    return v * scale


def _phase_columns(prob: AffineL1Problem, idx: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Real LP columns for the atoms ``phase * e_i``: stacked Re/Im of ``Q^* e_i phase``."""
    cols = prob.Q[idx].conj().T * phases
    return np.vstack([cols.real, cols.imag])


def _dedupe_atoms(idx: np.ndarray, phases: np.ndarray, tol: float = 1e-6):
    """Drop atoms repeating a coordinate at (nearly) the same phase.

    Near-parallel columns make the simplex basis numerically singular.
    """
    if idx.size == 0:
        return idx, phases
    ang = np.angle(phases)
    order = np.lexsort((ang, idx))
    i_s, p_s = idx[order], phases[order]
    dup = np.zeros(idx.size, dtype=bool)
    dup[1:] = (i_s[1:] == i_s[:-1]) & (np.abs(p_s[1:] - p_s[:-1]) < tol)
    # angles wrap at -pi/pi: compare the last atom of each coordinate with its first
    last = np.flatnonzero(np.append(i_s[1:] != i_s[:-1], True))
    first = np.concatenate([[0], last[:-1] + 1])
    wrap = (last > first) & (np.abs(p_s[last] - p_s[first]) < tol)
    dup[last[wrap]] = True
    keep = np.sort(order[~dup])
    return idx[keep], phases[keep]


def _polish(prob: AffineL1Problem, z: np.ndarray, lam: np.ndarray, max_rounds: int = 60, tol: float = 1e-10):
    """Column generation over phases, seeded by the ADMM iterate.

    With finitely many phases per coordinate the problem is an LP in the
    magnitudes.  Its multipliers ``w`` give ``g = Q w``; every coordinate with
    ``|g_i| > 1`` contributes a column at phase ``arg g_i``.  When no column
    prices out, the LP value is the optimum and ``w`` certifies it.
    Returns ``(value, lower, x)`` or ``None``.
    """
    Q, c = prob.Q, prob.c
    m = Q.shape[1]
    _, w0 = prob.dual_bound(lam)
    g0 = Q @ w0
    mag_z = np.abs(z)
    seeds = [np.flatnonzero(mag_z > 1e-8 * max(mag_z.max(initial=0.0), 1e-300))]
    seed_phases = [z[seeds[0]] / mag_z[seeds[0]]]
    near = np.flatnonzero(np.abs(g0) >= 0.97)
    seeds.append(near)
    seed_phases.append(g0[near] / np.abs(g0[near]))
    idx, ph = _dedupe_atoms(np.concatenate(seeds), np.concatenate(seed_phases))
    rhs = np.concatenate([c.real, c.imag])
    lp = StandardSimplex(_phase_columns(prob, idx, ph), rhs, np.ones(idx.size), tol=POLISH_LP_TOL)
    if lp.solve() != "optimal":
        # four fixed phases on every coordinate always span the constraint space
        all_idx = np.repeat(np.arange(prob.n), 4)
        all_ph = np.tile(np.array([1, 1j, -1, -1j]), prob.n)
        idx, ph = _dedupe_atoms(np.concatenate([idx, all_idx]), np.concatenate([ph, all_ph]))
        lp = StandardSimplex(_phase_columns(prob, idx, ph), rhs, np.ones(idx.size), tol=POLISH_LP_TOL)
        if lp.solve() != "optimal":
            return None
    lower = 0.0
    for _ in range(max_rounds):
        y = lp.duals
        w = y[:m] + 1j * y[m:]
        g = Q @ w
        mag = np.abs(g)
        peak = mag.max(initial=0.0)
        if peak > 0:
            lower = max(lower, abs(np.vdot(w, c)) / max(peak, 1.0))
        viol = np.flatnonzero(mag > 1.0 + tol)
        if viol.size == 0:
            break
        viol = viol[np.argsort(-mag[viol])][:200]
        new_ph = g[viol] / mag[viol]
        lp.add_columns(_phase_columns(prob, viol, new_ph), np.ones(viol.size))
        idx, ph = np.concatenate([idx, viol]), np.concatenate([ph, new_ph])
        if lp.solve() != "optimal":
            return None
    t = lp.x
    x = np.zeros(prob.n, dtype=complex)
    np.add.at(x, idx, t * ph)
    x = prob.project(x)
    return float(np.sum(np.abs(x))), float(lower), x


def _safe_polish(prob, z, lam):
    # the polish only ever improves a result; a degenerate basis just skips it
    try:
        return _polish(prob, z, lam)
    except np.linalg.LinAlgError:
        return None


def admm_l1_affine(
    A=None,
    b=None,
    tol: float = 1e-7,
    max_iter: int = 20_000,
    rho: float = 1.0,
    problem: AffineL1Problem | None = None,
    x0: np.ndarray | None = None,
    polish: bool = True,
) -> L1Result:
    """Minimise ``||x||_1`` subject to ``A x = b`` (complex).

    Stops when ``value - lower <= tol * (1 + value)``, where ``value`` is the
    l1 norm of the projected (exactly feasible) iterate and ``lower`` the
    dual bound from the scaled ADMM multiplier.  Raises
    :class:`InfeasibleL1` when ``b`` is outside the range of ``A``.
    """
    prob = problem if problem is not None else AffineL1Problem.from_system(A, b)
    n = prob.n
    z = prob.project(np.zeros(n, dtype=complex)) if x0 is None else np.asarray(x0, dtype=complex).copy()
    u = np.zeros(n, dtype=complex)
    best_val, best_x, best_low = np.inf, z, 0.0
    r_norm = s_norm = np.inf
    status = MAX_ITER
    it = 0
    check_every = 10
    polish_every = 500
    polished = False
    for it in range(1, max_iter + 1):
        x = prob.project(z - u)
        z_old = z
        z = soft_threshold(x + u, 1.0 / rho)
        u = u + x - z
        if it % check_every == 0 or it == max_iter:
            r_norm = np.linalg.norm(x - z)
            s_norm = rho * np.linalg.norm(z - z_old)
            xf = prob.project(z)
            val = float(np.sum(np.abs(xf)))
            low, _ = prob.dual_bound(rho * u)
            if val < best_val:
                best_val, best_x = val, xf
            best_low = max(best_low, low)
            if best_val - best_low <= tol * (1.0 + best_val):
                status = OPTIMAL
                break
            if polish and it % polish_every == 0 and best_val - best_low < 1e-2 * (1.0 + best_val):
                pol = _safe_polish(prob, z, rho * u)
                if pol is not None:
                    if pol[0] < best_val:
                        best_val, best_x = pol[0], pol[2]
                    best_low = max(best_low, pol[1])
                    if best_val - best_low <= tol * (1.0 + best_val):
                        status = OPTIMAL
                        polished = True
                        break
            # residual balancing
            if r_norm > 10 * s_norm:
                rho *= 2.0
                u /= 2.0
            elif s_norm > 10 * r_norm:
                rho /= 2.0
                u *= 2.0
    if polish and not polished and best_val - best_low > 1e-12 * (1.0 + best_val):
        pol = _safe_polish(prob, z, rho * u)
        if pol is not None:
            polished = True
            if pol[0] < best_val:
                best_val, best_x = pol[0], pol[2]
            best_low = max(best_low, pol[1])
            if best_val - best_low <= tol * (1.0 + best_val):
                status = OPTIMAL
    return L1Result(best_x, best_val, best_low, status, it, float(r_norm), float(s_norm), polished)
