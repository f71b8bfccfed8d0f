"""Closed-form vector and matrix gauges.

The k-support norm is the atomic norm whose atoms are unit vectors with at
most ``k`` nonzero entries.  It interpolates between l1 (``k = 1``) and l2
(``k = d``); its dual is the l2 norm of the ``k`` largest magnitudes.
Entanglement gauges reduce to it through the Schmidt vector.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import linalg
from .theories import (
    CoherenceK,
    GenuineMultipartite,
    MagicQubits,
    SchmidtK,
    UnsupportedError,
    bipartitions,
    build_polytope,
)

SCHMIDT_ZERO_TOL = 1e-12


def _sorted_magnitudes(x, k: int) -> np.ndarray:
    a = np.abs(np.asarray(x, dtype=complex).reshape(-1))
    if not 1 <= k <= a.size:
        raise ValueError(f"k must lie in 1..{a.size}, got {k}")
    # stable sort: ties broken by original index
    return a[np.argsort(-a, kind="stable")]


def ksupport_split(x, k: int) -> int:
    """The split index ``r`` of the k-support norm formula.

    With magnitudes ``a_1 >= a_2 >= ...`` (1-based, ``a_0 = inf``), ``r`` is
    the smallest value in ``0..k-1`` with
    ``a_{k-r-1} > tail / (r+1) >= a_{k-r}``, where ``tail = sum_{i >= k-r} a_i``.
    """
    a = _sorted_magnitudes(x, k)
    padded = np.concatenate([[np.inf], a])  # padded[i] = a_i, 1-based
    suffix = np.concatenate([np.cumsum(a[::-1])[::-1], [0.0]])  # suffix[i-1] = sum_{j>=i} a_j
    scale = 1e-13 * (1.0 + suffix[0])
    for r in range(k):
        avg = suffix[k - r - 1] / (r + 1)
        if padded[k - r - 1] > avg - scale and avg >= padded[k - r] - scale:
            return r
    raise ArithmeticError("no admissible split index; input is not finite")


def ksupport_norm(x, k: int) -> float:
    """k-support norm of a complex vector.

    Examples
    --------
    >>> ksupport_norm([3, 4], 1), ksupport_norm([3, 4], 2)
    (7.0, 5.0)
    """
    a = _sorted_magnitudes(x, k)
    r = ksupport_split(x, k)
    head = a[: k - r - 1]
    tail = a[k - r - 1 :].sum()
    return float(np.sqrt(head @ head + tail**2 / (r + 1)))


def ksupport_dual(x, k: int) -> float:
    """l2 norm of the ``k`` largest magnitudes."""
    a = _sorted_magnitudes(x, k)[:k]
    return float(np.sqrt(a @ a))


def coherence_rank(x, tol: float = 1e-9) -> int:
    return int(np.count_nonzero(np.abs(np.asarray(x)) > tol))


def schmidt_coefficients(psi, dA: int, dB: int) -> np.ndarray:
    lam = linalg.schmidt_decompose(psi, dA, dB).coefficients
    return np.where(lam < SCHMIDT_ZERO_TOL, 0.0, lam)


def schmidt_gauge(psi, dA: int, dB: int, k: int = 1) -> float:
    """k-support norm of the Schmidt vector; the sum of Schmidt coefficients for ``k = 1``."""
    return ksupport_norm(schmidt_coefficients(psi, dA, dB), k)


def pure_negativity(psi, dA: int, dB: int) -> float:
    """``sum_{j<k} lam_j lam_k`` written as ``(schmidt_gauge**2 - 1) / 2``."""
    return 0.5 * (schmidt_gauge(psi, dA, dB, 1) ** 2 - 1.0)


def split_schmidt(psi, dims: Sequence[int], left: Sequence[int], right: Sequence[int]) -> np.ndarray:
    """Schmidt coefficients of ``psi`` across the cut ``left | right`` of a multipartite system."""
    dims = tuple(dims)
    t = np.asarray(psi, dtype=complex).reshape(dims)
    t = np.transpose(t, tuple(left) + tuple(right))
    dl = int(np.prod([dims[i] for i in left]))
    s = np.linalg.svd(t.reshape(dl, -1), compute_uv=False)
    return np.where(s < SCHMIDT_ZERO_TOL, 0.0, s)


def genuine_gauge(psi, dims: Sequence[int]) -> float:
    """Smallest sum of Schmidt coefficients over all bipartitions."""
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ValueError("need at least two parties")
    if len(dims) > 12:
        raise ValueError("bipartition enumeration is limited to 12 parties")
    return min(float(split_schmidt(psi, dims, l, r).sum()) for l, r in bipartitions(len(dims)))


def elementwise_l1(rho) -> float:
    return float(np.abs(rho).sum())


def elementwise_max(rho) -> float:
    return float(np.abs(rho).max())


def max_diag_clipped(rho) -> float:
    return max(0.0, float(np.max(np.real(np.diag(rho)))))


def pure_polar(psi, theory) -> float:
    """Squared polar vector gauge: the largest overlap of ``psi`` with a free pure state."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != theory.dim:
        raise ValueError(f"state has dimension {psi.size}, theory expects {theory.dim}")
    if isinstance(theory, CoherenceK):
        return ksupport_dual(psi, theory.k) ** 2
    if isinstance(theory, SchmidtK):
        return ksupport_dual(schmidt_coefficients(psi, theory.dA, theory.dB), theory.k) ** 2
    if isinstance(theory, GenuineMultipartite):
        n = len(theory.dims)
        return max(float(split_schmidt(psi, theory.dims, l, r)[0] ** 2) for l, r in bipartitions(n))
    if theory.is_polytope:
        return float(build_polytope(theory).overlaps(psi).max())
    raise UnsupportedError(f"no polar gauge for {theory!r}")


def geometric_pure(psi, theory) -> float:
    """One minus the largest squared overlap with a free pure state."""
    return max(0.0, 1.0 - pure_polar(psi, theory))


def closed_form_vector_gauge(psi, theory) -> float:
    """Vector gauge of ``psi`` for theories whose free set admits a closed form.

    Coherence uses the k-support norm of the amplitudes, Schmidt-number
    theories the k-support norm of the Schmidt vector, genuine multipartite
    entanglement the bipartition minimum.  Magic has no closed form.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if isinstance(theory, CoherenceK):
        return ksupport_norm(psi, theory.k)
    if isinstance(theory, SchmidtK):
        return schmidt_gauge(psi, theory.dA, theory.dB, theory.k)
    if isinstance(theory, GenuineMultipartite):
        return genuine_gauge(psi, theory.dims)
    raise UnsupportedError(f"{theory} has no closed-form vector gauge")


def _ball_box_support(u: np.ndarray, radius: float, cap: float) -> float:
    """``max b.u`` over ``||b||_2 <= radius, ||b||_inf <= cap`` for ``u >= 0`` sorted decreasingly."""
    if radius <= 0.0 or cap <= 0.0:
        return 0.0
    for s in range(u.size + 1):
        if s * cap * cap > radius * radius:
            break
        rest = u[s:]
        r2 = float(rest @ rest)
        if r2 <= 0.0:
            return cap * float(u[:s].sum())
        t = np.sqrt((radius * radius - s * cap * cap) / r2)
        slack = 1e-12 * cap  # regimes meet at kinks; accept either side there
        if (s == u.size or t * u[s] <= cap + slack) and (s == 0 or t * u[s - 1] >= cap - slack):
            return cap * float(u[:s].sum()) + t * r2
    # every coordinate saturates before the ball binds
    return cap * float(u.sum())


def _witness_candidates(u: np.ndarray) -> list[float]:
    """Values of ``a`` where the concave objective can peak: ends, kinks and piece-wise stationary points.

    On the piece where the ``s`` largest coordinates sit at the cap
    ``1 - a`` and the ball is tight, the objective is
    ``a + (1 - a) S + sqrt(R (a^2 - s (1 - a)^2))`` with ``S`` the sum of the
    saturated coordinates and ``R`` the squared norm of the rest.
    """
    cands = [0.0, 1.0]
    m = u.size
    for s in range(1, m + 1):
        cands.append(np.sqrt(s) / (1.0 + np.sqrt(s)))  # ball stops binding
    for s in range(m + 1):
        S = float(u[:s].sum())
        R = float(u[s:] @ u[s:])
        if s < m and u[s] > 0:
            q = np.sqrt(R + s * u[s] ** 2)
            cands.append(q / (u[s] + q))  # coordinate s reaches the cap
        if R <= 0 or S <= 1.0:
            continue
        # (S - 1)^2 (a^2 - s (1-a)^2) = R (a + s (1-a))^2, a quadratic in a
        k2 = (S - 1.0) ** 2
        lin = lambda a: a * (1 - s) + s  # a + s(1 - a)
        A = k2 * (1 - s) - R * (1 - s) ** 2
        B = k2 * 2 * s - 2 * R * (1 - s) * s
        C = -k2 * s - R * s * s
        if abs(A) < 1e-15:
            roots = [-C / B] if abs(B) > 1e-15 else []
        else:
            disc = B * B - 4 * A * C
            roots = [] if disc < 0 else [(-B + sg * np.sqrt(disc)) / (2 * A) for sg in (1.0, -1.0)]
        cands.extend(r for r in roots if 0.0 <= r <= 1.0 and lin(r) >= 0)
    return cands


def qubit_magic_witness_value(bloch) -> float:
    """``max <rho, Z>`` over ``Z >= 0`` with ``<s, Z> <= 1`` on the six one-qubit stabilizer states.

    Writing ``Z = a I + b.sigma`` the constraints become ``||b||_2 <= a`` and
    ``a + ||b||_inf <= 1``; the objective is ``a + b.r`` for Bloch vector
    ``r``.  The inner maximum over ``b`` is a ball-box water-filling; the
    outer maximum over ``a`` is concave and piecewise smooth, so it is
    attained at one of finitely many explicit candidates.  Equals one plus
    the generalised robustness of the state.
    """
    u = np.sort(np.abs(np.asarray(bloch, dtype=float)))[::-1]
    return float(max(a + _ball_box_support(u, a, 1.0 - a) for a in _witness_candidates(u)))


def bloch_vector(psi_or_rho) -> np.ndarray:
    m = np.asarray(psi_or_rho, dtype=complex)
    if m.ndim == 1:
        m = np.outer(m, m.conj())
    return np.array([2 * m[0, 1].real, -2 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real])


def qubit_magic_gauge(psi) -> float:
    """Atomic gauge of a one-qubit vector over the stabilizer states (with phases)."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nrm2 = float(np.vdot(psi, psi).real)
    if nrm2 == 0.0:
        return 0.0
    return float(np.sqrt(nrm2 * qubit_magic_witness_value(bloch_vector(psi / np.sqrt(nrm2)))))
