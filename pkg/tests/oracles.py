"""Independent reference computations used only by the tests.

These go through generic convex solvers (cvxpy, scipy) or textbook
variational formulas so they share no code path with the package.
"""

import itertools
import warnings

import numpy as np

try:
    import cvxpy as cp
except ImportError:  # pragma: no cover
    cp = None

SOLVER_TOL = dict(tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)


def _solve(problem):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        problem.solve(solver=cp.CLARABEL, **SOLVER_TOL)
    return problem.value


def ksupport_dual_ball(x, k):
    """``max Re<x, y>`` over complex ``y`` whose every k-subvector has l2 norm <= 1."""
    x = np.asarray(x, dtype=complex)
    d = x.size
    y = cp.Variable(d, complex=True)
    cons = [cp.norm(y[list(S)], 2) <= 1 for S in itertools.combinations(range(d), k)]
    return _solve(cp.Problem(cp.Maximize(cp.real(np.conj(x) @ y)), cons))


def ksupport_variational(x, k, iters=200):
    """``sqrt(min sum a_i^2 / t_i)`` over ``0 < t_i <= 1``, ``sum t = k``, solved by bisection on the multiplier."""
    a = np.abs(np.asarray(x, dtype=complex))
    if not a.any():
        return 0.0
    # stationarity: t_i = min(1, a_i / mu); pick mu so the t_i sum to k
    lo, hi = 0.0, a.sum() / k * 2 + 1.0
    for _ in range(iters):
        mu = 0.5 * (lo + hi)
        if np.minimum(1.0, a / mu).sum() > k:
            lo = mu
        else:
            hi = mu
    t = np.minimum(1.0, a / hi)
    nz = a > 0
    return float(np.sqrt(np.sum(a[nz] ** 2 / t[nz])))


def hermitian_var(d):
    return cp.Variable((d, d), hermitian=True)


def generalized_robustness_sdp(rho, projectors):
    """``min sum x - 1`` over ``x >= 0`` with ``sum x_i P_i - rho >= 0``."""
    n = len(projectors)
    x = cp.Variable(n, nonneg=True)
    M = sum(x[i] * projectors[i] for i in range(n)) - rho
    return _solve(cp.Problem(cp.Minimize(cp.sum(x)), [(M + M.H) / 2 >> 0])) - 1.0


def coherence_robustness_sdp(rho, k):
    """``max <rho, Z> - 1`` over ``Z >= 0`` with every k x k principal block ``<= I``."""
    d = rho.shape[0]
    Z = hermitian_var(d)
    cons = [Z >> 0]
    for S in itertools.combinations(range(d), k):
        idx = list(S)
        cons.append(np.eye(k) - Z[idx][:, idx] >> 0)
    return _solve(cp.Problem(cp.Maximize(cp.real(cp.trace(rho @ Z))), cons)) - 1.0


def standard_robustness_lp(rho, projectors):
    """``min sum b`` with ``sum (a - b) P = rho`` through scipy's HiGHS."""
    from scipy.optimize import linprog

    n = len(projectors)
    d = rho.shape[0]
    rows = []
    for P in projectors:
        rows.append(np.concatenate([P.real.ravel(), P.imag.ravel()]))
    A = np.array(rows).T
    b = np.concatenate([rho.real.ravel(), rho.imag.ravel()])
    res = linprog(np.concatenate([np.zeros(n), np.ones(n)]), A_eq=np.hstack([A, -A]), b_eq=b, bounds=(0, None), method="highs")
    return res.fun if res.status == 0 else np.inf


def max_fidelity_sdp(rho, projectors):
    """``max ||sqrt(rho) sqrt(sigma)||_1`` over the hull, via the standard fidelity SDP."""
    d = rho.shape[0]
    n = len(projectors)
    x = cp.Variable(n, nonneg=True)
    sigma = sum(x[i] * projectors[i] for i in range(n))
    X = cp.Variable((d, d), complex=True)
    block = cp.bmat([[rho, X], [X.H, sigma]])
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(X))), [(block + block.H) / 2 >> 0, cp.sum(x) == 1])
    return _solve(prob)
