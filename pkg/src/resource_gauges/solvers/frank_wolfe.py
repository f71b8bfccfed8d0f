"""Frank-Wolfe (conditional gradient) ascent over the convex hull of given vertices.

Uses away steps and an exact golden-section line search, so a vertex
optimum is reached in a single step and interior optima converge quickly.
The Frank-Wolfe gap ``max_i <V_i - P, grad f(P)>`` bounds the distance of
the current value from the maximum of a concave ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

OPTIMAL = "optimal"
MAX_ITER = "max_iter"
STALLED = "stalled"

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class FWResult:
    weights: np.ndarray
    point: np.ndarray
    value: float
    gap: float
    iterations: int
    status: str


def golden_section_max(phi: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12):
    """Maximise a unimodal ``phi`` on ``[lo, hi]``; the endpoints are candidates too."""
    best_t, best_v = lo, phi(lo)
    v_hi = phi(hi)
    if v_hi >= best_v:
        best_t, best_v = hi, v_hi
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > tol * (1.0 + abs(hi - lo)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = phi(d)
    for t, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_t, best_v = t, v
    return best_t, best_v


def _inner(vertices: np.ndarray, g: np.ndarray) -> np.ndarray:
    flat_v = vertices.reshape(vertices.shape[0], -1)
    return np.real(flat_v.conj() @ g.reshape(-1))


def frank_wolfe_maximize(
    f: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    vertices: np.ndarray,
    tol: float = 1e-6,
    max_iter: int = 2000,
    x0: np.ndarray | None = None,
    away_steps: bool = True,
) -> FWResult:
    """Maximise a concave ``f`` over ``conv(vertices)``.

    Parameters
    ----------
    f, grad
        Objective and its gradient, both evaluated at a point
        ``P = sum_i x_i vertices[i]``.  The gradient lives in the same
        space as the vertices; pairing is the real Frobenius product.
    vertices
        Array of shape ``(N, ...)``.
    tol
        Stop once the Frank-Wolfe gap is at most ``tol``.

    Returns
    -------
    FWResult
        Weights, point, value, final gap and status.
    """
    vertices = np.asarray(vertices)
    n = vertices.shape[0]
    x = np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=float).copy()
    x /= x.sum()
    centre = np.tensordot(np.full(n, 1.0 / n), vertices, axes=1)

    def point(w):
        return np.tensordot(w, vertices, axes=1)

    def safe_grad(p):
        g = grad(p)
        eps = 1e-10
        while not np.all(np.isfinite(g)) and eps < 1e-2:
            # boundary of the domain: nudge towards the centre and retry
            g = grad((1.0 - eps) * p + eps * centre)
            eps *= 100.0
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("gradient is not finite near the current point")
        return g

    gap = np.inf
    status = MAX_ITER
    it = 0
    p = point(x)
    value = f(p)
    for it in range(1, max_iter + 1):
        g = safe_grad(p)
        scores = _inner(vertices, g)
        here = float(scores @ x)
        s = int(np.argmax(scores))
        gap = float(scores[s] - here)
        if gap <= tol:
            status = OPTIMAL
            break
        active = np.flatnonzero(x > 0)
        a = int(active[np.argmin(scores[active])])
        use_away = away_steps and here - scores[a] > gap and x[a] < 1.0
        if use_away:
            direction = x - np.eye(n)[a]
            gmax = x[a] / (1.0 - x[a])
        else:
            direction = np.eye(n)[s] - x
            gmax = 1.0
        step, val = golden_section_max(lambda t: f(point(x + t * direction)), 0.0, gmax)
        if val < value:
            step, val = 0.0, value
        if step == 0.0:
            # no progress along the chosen direction; the other one must help
            if use_away:
                direction = np.eye(n)[s] - x
                step, val = golden_section_max(lambda t: f(point(x + t * direction)), 0.0, 1.0)
            if step == 0.0 or val < value:
                status = STALLED
                break
        x = np.clip(x + step * direction, 0.0, None)
        if use_away and step == gmax:
            x[a] = 0.0
        x /= x.sum()
        p = point(x)
        value = f(p)
    return FWResult(weights=x, point=p, value=float(value), gap=float(gap), iterations=it, status=status)
