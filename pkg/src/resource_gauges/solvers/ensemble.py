"""Pure-state ensemble search for convex-roof upper bounds.

Every ensemble ``{p_i, psi_i}`` of ``rho = sum_j lam_j e_j e_j^*`` with ``m``
members has the form ``x_i = sum_j conj(U_ij) sqrt(lam_j) e_j`` for an
``m x r`` matrix ``U`` with orthonormal columns, ``p_i = ||x_i||^2``.  The
objective ``sum_i p_i g(psi_i)`` is minimised over ``U`` by coordinate
descent with two-row complex Givens rotations, one golden-section search per
angle and per phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .. import linalg
from .frank_wolfe import golden_section_max

RANK_TOL = 1e-10
WEIGHT_FLOOR = 1e-14


@dataclass
class Ensemble:
    """Weights and unit vectors; ``sum_i p_i psi_i psi_i^*`` reproduces the state."""

    weights: np.ndarray
    states: np.ndarray  # one row per member

    def density(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.weights, self.states, self.states.conj())


@dataclass
class EnsembleResult:
    value: float
    ensemble: Ensemble
    restart_values: list[float]
    members: int


@dataclass
class EnsembleState:
    """Spectral data of the state plus the isometry ``U`` parametrising an ensemble."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    U: np.ndarray

    @property
    def members(self) -> np.ndarray:
        """Unnormalised member vectors ``x_i`` as rows."""
        return self.U.conj() @ (np.sqrt(self.eigenvalues)[:, None] * self.eigenvectors.T)

    def ensemble(self) -> Ensemble:
        x = self.members
        p = np.sum(np.abs(x) ** 2, axis=1)
        keep = p > WEIGHT_FLOOR
        return Ensemble(p[keep], x[keep] / np.sqrt(p[keep])[:, None])


def random_isometry(m: int, r: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r))
    q, rr = np.linalg.qr(z)
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


def isometry_from_members(members: np.ndarray, eigenvalues, eigenvectors) -> np.ndarray:
    """Recover ``U`` from member vectors ``x_i`` (rows) of a decomposition of the state."""
    coeffs = members @ eigenvectors.conj()  # <e_j|x_i>
    return np.conj(coeffs / np.sqrt(eigenvalues)[None, :])


def _givens_rows(ua, ub, theta, phi):
    c, s = np.cos(theta), np.sin(theta)
    return c * ua - np.exp(1j * phi) * s * ub, np.exp(-1j * phi) * s * ua + c * ub


def _givens_apply(U, a, b, theta, phi):
    out = U.copy()
    out[a], out[b] = _givens_rows(U[a], U[b], theta, phi)
    return out


def _member_value(g, row_u, lam_sqrt_e) -> float:
    x = row_u.conj() @ lam_sqrt_e
    p = float(np.vdot(x, x).real)
    return p * g(x / np.sqrt(p)) if p > WEIGHT_FLOOR else 0.0


def _descend(g, state: EnsembleState, sweeps: int, tol: float, floor: float = -np.inf) -> float:
    lam_sqrt_e = np.sqrt(state.eigenvalues)[:, None] * state.eigenvectors.T
    m = state.U.shape[0]
    # a rotation of rows (a, b) only changes members a and b; cache the others
    parts = np.array([_member_value(g, row, lam_sqrt_e) for row in state.U])
    best = float(parts.sum())
    for _ in range(sweeps):
        if best <= floor + tol:
            break
        start = best
        for a in range(m):
            for b in range(a + 1, m):
                ua, ub = state.U[a].copy(), state.U[b].copy()
                base = best - parts[a] - parts[b]

                def pair(t, f):
                    ra, rb = _givens_rows(ua, ub, t, f)
                    return _member_value(g, ra, lam_sqrt_e) + _member_value(g, rb, lam_sqrt_e)

                t, v = golden_section_max(lambda t: -pair(t, 0.0), -np.pi / 2, np.pi / 2, 1e-5)
                f = 0.0
                if abs(t) > 1e-12:
                    # with the angle fixed, search the relative phase of the rotation
                    f2, v2 = golden_section_max(lambda f: -pair(t, f), 0.0, 2 * np.pi, 1e-5)
                    if v2 > v:
                        v, f = v2, f2
                    if base - v < best - 1e-15:
                        ra, rb = _givens_rows(ua, ub, t, f)
                        state.U[a], state.U[b] = ra, rb
                        parts[a] = _member_value(g, ra, lam_sqrt_e)
                        parts[b] = _member_value(g, rb, lam_sqrt_e)
                        best = float(parts.sum())
        if start - best <= tol * (1.0 + abs(best)):
            break
    return best


def ensemble_optimize(
    rho: np.ndarray,
    g: Callable[[np.ndarray], float],
    m: int | None = None,
    restarts: int = 32,
    seed: int = 0,
    sweeps: int = 20,
    tol: float = 1e-9,
    initial: Sequence[np.ndarray] = (),
    floor: float = -np.inf,
) -> EnsembleResult:
    """Upper bound on the convex roof of ``g`` at ``rho``.

    ``g`` takes a unit vector and must be invariant under global phase.
    Each restart ``i`` uses a random isometry seeded with ``seed + i``;
    ``initial`` adds explicit starting decompositions, given as arrays of
    unnormalised member vectors (rows) summing to ``rho``.  The result is
    the smallest value over all starts, ties resolved by start order.
    A start stops early once it reaches ``floor``, a known lower bound.
    """
    spec = linalg.hermitian_eig(rho)
    keep = spec.eigenvalues > RANK_TOL * max(1.0, spec.eigenvalues[0])
    lam = spec.eigenvalues[keep]
    vecs = spec.eigenvectors[:, keep]
    lam = lam / lam.sum()
    r = lam.size
    if r == 1:
        psi = vecs[:, 0]
        val = float(g(psi))
        return EnsembleResult(val, Ensemble(np.ones(1), psi[None, :]), [val], 1)
    if m is None:
        m = min(r * r, 2 * r + 2)
    m = max(m, r)
    starts: list[np.ndarray] = []
    for members in initial:
        members = np.asarray(members, dtype=complex)
        U = isometry_from_members(members, lam, vecs)
        if U.shape[0] < m:
            U = np.vstack([U, np.zeros((m - U.shape[0], r), dtype=complex)])
        starts.append(U)
    for i in range(restarts):
        starts.append(random_isometry(m, r, np.random.default_rng(seed + i)))
    best_val, best_state, values = np.inf, None, []
    for U in starts:
        st = EnsembleState(lam, vecs, U)
        val = _descend(g, st, sweeps, tol, floor)
        values.append(val)
        if val < best_val:
            best_val, best_state = val, st
        if best_val <= floor + tol:
            break
    return EnsembleResult(float(best_val), best_state.ensemble(), values, best_state.U.shape[0])
