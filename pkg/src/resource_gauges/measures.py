"""Resource quantifiers.

Every function returns a :class:`MeasureResult` carrying the value, a
lower/upper bracket, a status and, where the underlying program has a
dual, a witness operator.  Pure inputs take the closed-form routes (the
generalised robustness of a pure state is the squared vector gauge minus
one); mixed inputs go through the LP / cutting-plane / ADMM solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import gauges, linalg
from .solvers.admm import AffineL1Problem, admm_l1_affine
from .solvers.cutting_plane import PSDBlock, cutting_plane_psd
from .solvers.ensemble import ensemble_optimize
from .solvers.frank_wolfe import frank_wolfe_maximize
from .solvers.simplex import OPTIMAL as LP_OPTIMAL
from .solvers.simplex import LinearProgram, simplex_solve
from .theories import (
    CoherenceK,
    GenuineMultipartite,
    MagicQubits,
    PolytopeFreeSet,
    SchmidtK,
    UnsupportedError,
    build_polytope,
    free_membership,
    vertex_sum_direction,
)

CERTIFIED = "certified"
UNCERTIFIED = "uncertified"
INFINITE = "infinite"
HEURISTIC = "heuristic"

CERTIFY_TOL = 1e-5
PURE_RANK_TOL = 1e-10


@dataclass
class SolverConfig:
    """Knobs shared by the measures; defaults mirror the solver defaults."""

    tol: float = 1e-9
    max_iter: int = 20_000
    max_rounds: int = 2000
    restarts: int = 32
    seed: int = 0
    sweeps: int = 20
    eps_psd: float | None = None
    gap_tol: float = 1e-8
    fw_tol: float = 1e-7


DEFAULT = SolverConfig()


@dataclass
class MeasureResult:
    """Value with bracket ``lower <= value <= upper``.

    ``bound`` says how to read ``value`` when the bracket is loose:
    ``"exact"`` for closed forms and certified programs, ``"upper"`` or
    ``"lower"`` for one-sided heuristics.
    """

    value: float
    status: str
    lower: float
    upper: float
    witness: np.ndarray | None = None
    bound: str = "exact"
    stats: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        if not (np.isfinite(self.upper) and np.isfinite(self.lower)):
            return np.inf
        return self.upper - self.lower

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def finite(self) -> bool:
        return self.status != INFINITE


def _bracket(value, lower, upper, witness=None, stats=None, bound="exact") -> MeasureResult:
    # a lower bound above the upper one means a solver returned garbage
    consistent = not lower > upper + 1e-9 * (1.0 + abs(upper))
    lower = min(lower, value)
    upper = max(upper, value)
    ok = consistent and np.isfinite(upper) and upper - lower <= CERTIFY_TOL * (1.0 + abs(value))
    return MeasureResult(float(value), CERTIFIED if ok else UNCERTIFIED, float(lower), float(upper), witness, bound, stats or {})


def _exact(value, stats=None) -> MeasureResult:
    return MeasureResult(float(value), CERTIFIED, float(value), float(value), None, "exact", stats or {})


def _infinite(stats=None) -> MeasureResult:
    return MeasureResult(np.inf, INFINITE, np.inf, np.inf, None, "exact", stats or {})


# -- input handling ------------------------------------------------------

def as_density(state) -> np.ndarray:
    """Density matrix from either a state vector or a matrix."""
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        a = a / np.linalg.norm(a)
        return np.outer(a, a.conj())
    return linalg.check_density(a)


def pure_part(state) -> np.ndarray | None:
    """Unit vector if ``state`` is pure (a vector or a rank-one matrix), else ``None``."""
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        return a / np.linalg.norm(a)
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    if w[-2:-1].size and abs(w[-2]) > PURE_RANK_TOL:
        return None
    return v[:, -1]


def _check_dim(rho: np.ndarray, theory) -> None:
    if rho.shape[0] != theory.dim:
        raise ValueError(f"state has dimension {rho.shape[0]}, theory {theory} expects {theory.dim}")


def _polytope(theory) -> PolytopeFreeSet:
    try:
        return build_polytope(theory)
    except UnsupportedError:
        raise UnsupportedError(f"mixed-state programs need a polytope theory; {theory} is not one") from None


# -- vector gauges -------------------------------------------------------

def vector_gauge(psi, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """Atomic gauge of a pure state over the free pure states.

    Closed forms for coherence, Schmidt number and genuine multipartite
    entanglement; for magic the complex l1 program over the stabilizer
    dictionary.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != theory.dim:
        raise ValueError(f"state has dimension {psi.size}, theory {theory} expects {theory.dim}")
    if theory.is_polytope and not isinstance(theory, CoherenceK):
        poly = build_polytope(theory)
        res = admm_l1_affine(poly.dictionary, psi, tol=config.tol, max_iter=config.max_iter)
        return _bracket(res.value, res.lower, res.value, stats={"iterations": res.iterations, "solver": "admm"})
    return _exact(gauges.closed_form_vector_gauge(psi, theory))


def _squared_gauge_fn(theory, config: SolverConfig):
    """Fast pure-state objective ``psi -> Gamma_V(psi)**2`` used inside ensemble searches."""
    if isinstance(theory, MagicQubits) and theory.n == 1:
        return lambda v: gauges.qubit_magic_gauge(v) ** 2
    if theory.is_polytope and not isinstance(theory, CoherenceK):
        prob_T = build_polytope(theory).dictionary

        def g(v):
            return admm_l1_affine(prob_T, v, tol=max(config.tol, 1e-8), max_iter=config.max_iter).value ** 2

        return g
    return lambda v: gauges.closed_form_vector_gauge(v, theory) ** 2


# -- standard robustness and base gauge ---------------------------------

def _span_residual(C: np.ndarray, b: np.ndarray) -> float:
    coef, *_ = np.linalg.lstsq(C, b, rcond=None)
    return float(np.linalg.norm(C @ coef - b))


def _signed_decomposition(rho, theory, objective: str) -> MeasureResult:
    rho = as_density(rho)
    _check_dim(rho, theory)
    poly = _polytope(theory)
    C = poly.coords
    b = linalg.hermitian_coords(rho)
    if _span_residual(C, b) > 1e-9:
        return _infinite({"reason": "state outside the span of the free states"})
    N = poly.size
    c = np.concatenate([np.zeros(N), np.ones(N)]) if objective == "negative" else np.ones(2 * N)
    sol = simplex_solve(LinearProgram(c=c, A_eq=np.hstack([C, -C]), b_eq=b))
    if sol.status != LP_OPTIMAL:
        return MeasureResult(np.nan, sol.status, -np.inf, np.inf, stats={"pivots": sol.iterations})
    y = sol.eq_duals
    W = -linalg.from_hermitian_coords(y, poly.dim)
    dual_value = float(y @ b)
    stats = {"pivots": sol.iterations, "weights_pos": sol.x[:N], "weights_neg": sol.x[N:]}
    return _bracket(sol.value, dual_value, sol.value, witness=W, stats=stats)


def standard_robustness(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """Least total weight of free states that must be subtracted in an affine free decomposition.

    ``min sum(b)`` over ``a, b >= 0`` with ``sum_i (a_i - b_i) sigma_i = rho``.
    The witness ``W`` satisfies ``0 <= <W, sigma_i> <= 1`` and
    ``-<W, rho>`` equals the value.  States outside the span of the free
    states get status ``"infinite"``.
    """
    return _signed_decomposition(rho, theory, "negative")


def base_gauge(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """Gauge of the free states together with their negatives; ``2 R_s + 1`` on states."""
    res = _signed_decomposition(rho, theory, "total")
    if res.witness is not None:
        # the dual multiplier of the total-weight LP is a norm witness, not a robustness one
        res.stats["dual_operator"] = res.witness
        res.witness = None
    return res


# -- generalised robustness ---------------------------------------------

def _cut_model_robustness(rho, poly: PolytopeFreeSet, config: SolverConfig) -> MeasureResult:
    d, N = poly.dim, poly.size
    lp = LinearProgram(c=np.ones(N))
    block = PSDBlock(F0=-rho, F=poly.projectors)
    res = cutting_plane_psd(
        lp,
        [block],
        eps_psd=config.eps_psd,
        max_rounds=config.max_rounds,
        restore=vertex_sum_direction(poly),
        gap_tol=config.gap_tol,
    )
    cuts = res.cuts
    Wp = np.zeros((d, d), dtype=complex)
    for y, w in zip(cuts.multipliers, cuts.vectors):
        Wp += y * np.outer(w, w.conj())
    W = np.eye(d) - Wp
    lower = float(np.real(np.vdot(Wp, rho))) - 1.0
    upper = res.upper - 1.0
    stats = {"rounds": res.rounds, "cuts": len(cuts), "pivots": res.pivots, "solver_status": res.status}
    if res.x_feasible is not None:
        stats["weights"] = res.x_feasible
    return _bracket(max(lower, 0.0), max(lower, 0.0), max(upper, 0.0), witness=W, stats=stats)


def _coherence_cut_model(rho, d: int, k: int, config: SolverConfig) -> MeasureResult:
    """``max <rho, Z>`` over ``Z >= 0`` whose ``k x k`` principal blocks are all ``<= I``.

    These constraints say exactly ``<v|Z|v> <= 1`` for every unit vector
    with at most ``k`` nonzero entries, so the optimum is one plus the
    generalised robustness of ``k``-coherence.
    """
    basis = linalg.hermitian_basis(d)
    n = basis.shape[0]
    c = -np.array([np.real(np.vdot(B, rho)) for B in basis])
    # bounded base LP: diagonal entries in [0, 1], other coordinates in [-sqrt2, sqrt2]
    G = np.vstack([np.eye(n), -np.eye(n)])
    diag_mask = np.array([np.count_nonzero(np.abs(np.diag(B)) > 0) > 0 for B in basis])
    h = np.concatenate([np.where(diag_mask, 1.0, np.sqrt(2)), np.where(diag_mask, 0.0, np.sqrt(2))])
    lp = LinearProgram(c=c, G=G, h=h, free=np.ones(n, dtype=bool))
    blocks = [PSDBlock(F0=np.zeros((d, d), dtype=complex), F=basis)]
    subsets = list(combinations(range(d), k))
    for I in subsets:
        idx = np.ix_(I, I)
        blocks.append(PSDBlock(F0=np.eye(k, dtype=complex), F=-basis[(slice(None),) + idx]))

    def feasible(z):
        # clip to the PSD cone, then shrink until every k-block fits under I
        Z = np.tensordot(z, basis, axes=1)
        w, v = np.linalg.eigh(0.5 * (Z + Z.conj().T))
        Zp = (v * np.clip(w, 0.0, None)) @ v.conj().T
        peak = max(np.linalg.eigvalsh(Zp[np.ix_(I, I)])[-1] for I in subsets)
        if peak <= 0:
            return None
        return linalg.hermitian_coords(Zp / max(peak, 1.0))

    res = cutting_plane_psd(
        lp, blocks, eps_psd=config.eps_psd, max_rounds=config.max_rounds, restore=feasible, gap_tol=config.gap_tol
    )
    # minimisation of -<rho, Z>: lower <-> upper bound on the maximum
    best_upper = -res.lower - 1.0
    best_lower = -res.upper - 1.0 if np.isfinite(res.upper) else -np.inf
    Z = None
    if res.x_feasible is not None:
        Z = np.tensordot(res.x_feasible, basis, axes=1)
    stats = {"rounds": res.rounds, "pivots": res.pivots, "solver_status": res.status, "blocks": len(blocks)}
    W = None if Z is None else np.eye(d) - Z
    return _bracket(max(best_lower, 0.0), max(best_lower, 0.0), max(best_upper, 0.0), witness=W, stats=stats)


def generalized_robustness(rho, theory, config: SolverConfig = DEFAULT, method: str = "auto") -> MeasureResult:
    """Least weight of an arbitrary state whose admixture makes ``rho`` free.

    ``method="auto"`` uses the pure-state identity ``R_g = Gamma_V**2 - 1``
    when the input is pure and otherwise the cutting-plane program.
    ``method="program"`` forces the program: for polytope theories
    ``min sum x`` with ``sum_i x_i sigma_i - rho >= 0``, for coherence
    theories the block-constrained dual, and for Schmidt-number theories
    on pure inputs the same dual applied to the Schmidt vector (local
    unitaries map the state onto a diagonal one).  The witness
    ``W = I - Z`` satisfies ``<W, sigma> >= 0`` on free states and
    ``I - W >= 0``.
    """
    psi = pure_part(rho)
    if method not in ("auto", "pure", "program"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "pure") and psi is not None:
        gv = vector_gauge(psi, theory, config)
        val = gv.value**2 - 1.0
        return MeasureResult(
            max(val, 0.0), gv.status, gv.lower**2 - 1.0, gv.upper**2 - 1.0, None, "exact", {"route": "pure", **gv.stats}
        )
    if method == "pure":
        raise ValueError("state is not pure")
    rho_m = as_density(rho)
    _check_dim(rho_m, theory)
    if theory.is_polytope:
        poly = _polytope(theory)
        out = _cut_model_robustness(rho_m, poly, config)
    elif isinstance(theory, CoherenceK):
        out = _coherence_cut_model(rho_m, theory.d, theory.k, config)
    elif isinstance(theory, SchmidtK) and psi is not None:
        lam = gauges.schmidt_coefficients(psi, theory.dA, theory.dB)
        out = _coherence_cut_model(np.outer(lam, lam), lam.size, theory.k, config)
        out.witness = None  # lives on the Schmidt basis, not the full space
    else:
        raise UnsupportedError(f"generalised robustness of mixed states is not available for {theory}")
    out.stats["route"] = "program"
    return out


def log_generalized_robustness(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """``log2(1 + R_g)``: the min-over-free-states max-relative entropy."""
    r = generalized_robustness(rho, theory, config)
    f = lambda x: float(np.log2(1.0 + max(x, 0.0)))
    return MeasureResult(f(r.value), r.status, f(r.lower), f(r.upper), r.witness, r.bound, r.stats)


# -- random robustness, BFA, modified trace distance --------------------

def random_robustness(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """Least ``s`` with ``(rho + s I/d) / (1 + s)`` free."""
    rho = as_density(rho)
    _check_dim(rho, theory)
    poly = _polytope(theory)
    d, N = poly.dim, poly.size
    C = poly.coords
    mix = linalg.hermitian_coords(np.eye(d) / d)
    b = linalg.hermitian_coords(rho)
    A = np.hstack([C, -mix[:, None]])
    c = np.concatenate([np.zeros(N), [1.0]])
    sol = simplex_solve(LinearProgram(c=c, A_eq=A, b_eq=b))
    if sol.status != LP_OPTIMAL:
        return _infinite({"reason": "maximally mixed state is not interior to the free set", "lp_status": sol.status})
    y = sol.eq_duals
    W = -linalg.from_hermitian_coords(y, d)
    return _bracket(sol.value, float(y @ b), sol.value, witness=W, stats={"pivots": sol.iterations})


def best_free_approximation(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """One minus the largest free weight ``lam`` with ``rho - lam sigma >= 0`` for a free ``sigma``."""
    rho = as_density(rho)
    _check_dim(rho, theory)
    poly = _polytope(theory)
    N = poly.size
    S = poly.projectors
    lp = LinearProgram(c=-np.ones(N), G=np.ones((1, N)), h=np.ones(1))
    block = PSDBlock(F0=rho, F=-S)

    def shrink(x):
        # largest t in [0, 1] with rho - t * sigma(x) >= 0
        x = np.clip(x, 0.0, None)
        sig = np.tensordot(x, S, axes=1)
        lo, hi = 0.0, 1.0
        for _ in range(60):
            t = 0.5 * (lo + hi)
            if np.linalg.eigvalsh(rho - t * sig)[0] >= -1e-13:
                lo = t
            else:
                hi = t
        return lo * x

    res = cutting_plane_psd(
        lp, [block], eps_psd=config.eps_psd, max_rounds=config.max_rounds, restore=shrink, gap_tol=config.gap_tol
    )
    lam_hi = -res.lower
    lam_lo = -res.upper if np.isfinite(res.upper) else 0.0
    val = 1.0 - lam_hi
    stats = {"rounds": res.rounds, "solver_status": res.status, "free_weight": lam_hi}
    return _bracket(max(val, 0.0), max(val, 0.0), min(1.0, 1.0 - lam_lo), stats=stats)


def modified_trace_distance(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """``max -<rho, W>`` over ``-I <= W <= I`` with ``<W, sigma_i> >= 0`` on free states."""
    rho = as_density(rho)
    _check_dim(rho, theory)
    poly = _polytope(theory)
    d = poly.dim
    basis = linalg.hermitian_basis(d)
    n = basis.shape[0]
    C = poly.coords
    c = linalg.hermitian_coords(rho)  # minimise <rho, W>
    box = np.sqrt(2.0)
    G = np.vstack([-C.T, np.eye(n), -np.eye(n)])
    h = np.concatenate([np.zeros(poly.size), np.full(2 * n, box)])
    lp = LinearProgram(c=c, G=G, h=h, free=np.ones(n, dtype=bool))
    zero = np.zeros((d, d), dtype=complex)
    blocks = [PSDBlock(F0=np.eye(d) + zero, F=-basis), PSDBlock(F0=np.eye(d) + zero, F=basis)]

    def shrink(w):
        Wm = np.tensordot(w, basis, axes=1)
        nrm = np.max(np.abs(np.linalg.eigvalsh(0.5 * (Wm + Wm.conj().T))))
        return w / max(nrm, 1.0)

    res = cutting_plane_psd(
        lp, blocks, eps_psd=config.eps_psd, max_rounds=config.max_rounds, restore=shrink, gap_tol=config.gap_tol
    )
    upper = max(-res.lower, 0.0)
    lower = max(-res.upper, 0.0) if np.isfinite(res.upper) else 0.0
    W = None if res.x_feasible is None else np.tensordot(res.x_feasible, basis, axes=1)
    return _bracket(lower, lower, upper, witness=W, stats={"rounds": res.rounds, "solver_status": res.status})


# -- nuclear gauge -------------------------------------------------------

def nuclear_gauge(rho, theory, config: SolverConfig = DEFAULT) -> MeasureResult:
    """``min ||X||_l1`` (entrywise, complex) subject to ``T X T^* = rho``.

    ``T`` is the free-state dictionary.  For coherence with ``k = 1`` the
    dictionary is the identity and the value is the entrywise l1 norm.
    """
    rho = as_density(rho)
    _check_dim(rho, theory)
    poly = _polytope(theory)
    T = poly.dictionary
    A = np.kron(T, T.conj())
    b = rho.reshape(-1)
    prob = AffineL1Problem.from_system(A, b)
    res = admm_l1_affine(problem=prob, tol=config.tol, max_iter=config.max_iter)
    stats = {"iterations": res.iterations, "admm_status": res.status, "polished": res.polished}
    if isinstance(theory, CoherenceK):
        stats["closed_form"] = gauges.elementwise_l1(rho)
    X = res.x.reshape(poly.size, poly.size)
    stats["coefficients"] = X
    return _bracket(res.value, res.lower, res.value, stats=stats)


# -- convex roof ---------------------------------------------------------

def convex_roof_upper(rho, theory, config: SolverConfig = DEFAULT, lower_bounds: bool = True) -> MeasureResult:
    """Upper bound on the convex roof of ``Gamma_V**2`` from an ensemble search.

    Pure inputs return ``Gamma_V(psi)**2``.  For polytope theories a
    decomposition into free vertices (when one exists) seeds the search, so
    free states give exactly one.  ``lower`` holds the best available lower
    bound: ``max(nuclear gauge, R_g + 1)`` for polytope theories,
    ``2 N + 1`` from the negativity for two-party Schmidt-number one.
    """
    psi = pure_part(rho)
    if psi is not None:
        gv = vector_gauge(psi, theory, config)
        return MeasureResult(gv.value**2, gv.status, gv.lower**2, gv.upper**2, None, "exact", {"route": "pure"})
    rho = as_density(rho)
    _check_dim(rho, theory)
    g = _squared_gauge_fn(theory, config)
    initial = []
    lower = -np.inf
    if theory.is_polytope:
        poly = _polytope(theory)
        cert = free_membership(rho, theory)
        if cert.inside:
            initial.append(np.sqrt(np.clip(cert.weights, 0.0, None))[:, None] * poly.vectors)
        if lower_bounds:
            lower = max(nuclear_gauge(rho, theory, config).lower, generalized_robustness(rho, theory, config).lower + 1)
    elif isinstance(theory, SchmidtK) and theory.k == 1:
        lower = 2.0 * negativity(rho, theory.dA, theory.dB) + 1.0
    # every unit vector has gauge >= 1, so an ensemble reaching 1 is optimal
    res = ensemble_optimize(
        rho, g, restarts=config.restarts, seed=config.seed, sweeps=config.sweeps, initial=initial, floor=1.0
    )
    stats = {"restart_values": res.restart_values, "members": res.members, "ensemble": res.ensemble}
    return MeasureResult(res.value, HEURISTIC, float(lower), res.value, None, "upper", stats)


# -- geometric measure ---------------------------------------------------

def _root_fidelity_oracles(rho):
    sr = linalg.psd_sqrt(rho)

    def f(sigma):
        return linalg.root_fidelity(rho, sigma)

    def grad(sigma):
        m = sr @ sigma @ sr
        return 0.5 * sr @ linalg.psd_inv_sqrt(0.5 * (m + m.conj().T), floor=1e-12) @ sr

    return f, grad


def geometric_measure(rho, theory, config: SolverConfig = DEFAULT, method: str = "auto") -> MeasureResult:
    """One minus the largest fidelity ``||sqrt(rho) sqrt(sigma)||_1**2`` with a free state.

    Pure inputs use the largest overlap with a free pure state; mixed
    inputs (or ``method="fw"``) maximise the root fidelity over the free
    polytope by Frank-Wolfe and square at the end.  The Frank-Wolfe gap
    bounds how far the root fidelity is from its maximum.
    """
    psi = pure_part(rho)
    if method not in ("auto", "pure", "fw"):
        raise ValueError(f"unknown method {method!r}")
    if method != "fw" and psi is not None:
        return _exact(gauges.geometric_pure(psi, theory), {"route": "pure"})
    rho = as_density(rho)
    _check_dim(rho, theory)
    poly = _polytope(theory)
    f, grad = _root_fidelity_oracles(rho)
    res = frank_wolfe_maximize(f, grad, poly.projectors, tol=config.fw_tol, max_iter=config.max_iter)
    F = min(res.value, 1.0)
    value = max(0.0, 1.0 - F**2)
    lower = max(0.0, 1.0 - min(1.0, F + res.gap) ** 2)
    out = _bracket(value, lower, value, stats={"fw_gap": res.gap, "iterations": res.iterations, "fw_status": res.status})
    out.stats["route"] = "fw"
    out.stats["weights"] = res.weights
    return out


# -- negativity and polar gauges ----------------------------------------

def negativity(rho, dA: int, dB: int) -> float:
    """``(||rho^{T_B}||_1 - 1) / 2``."""
    rho = as_density(rho)
    if rho.shape[0] != dA * dB:
        raise ValueError(f"state has dimension {rho.shape[0]}, expected {dA} * {dB}")
    return 0.5 * (linalg.trace_norm(linalg.partial_transpose(rho, (dA, dB), 1)) - 1.0)


@dataclass
class PolarGauge:
    """Largest value of ``<sigma, P>`` over free states and where it is attained.

    ``threshold`` is the smallest ``lam`` with ``lam I - P`` nonnegative on
    every free state; it coincides with ``value``.  ``exact`` is false for
    heuristic ascents, in which case ``value`` is a lower bound.
    """

    value: float
    threshold: float
    argmax: np.ndarray | None
    exact: bool = True


def _best_low_rank(P, dA, dB, k, restarts, rng):
    """Truncated power ascent for ``max <v|P|v>`` over Schmidt rank ``<= k`` unit vectors."""
    best, arg = -np.inf, None
    w, v = np.linalg.eigh(P)
    starts = [v[:, -1]] + [rng.normal(size=dA * dB) + 1j * rng.normal(size=dA * dB) for _ in range(restarts)]
    for x in starts:
        x = x / np.linalg.norm(x)
        prev = -np.inf
        for _ in range(500):
            u, s, vh = np.linalg.svd((P @ x).reshape(dA, dB), full_matrices=False)
            y = ((u[:, :k] * s[:k]) @ vh[:k]).reshape(-1)
            y /= np.linalg.norm(y)
            val = float(np.real(np.vdot(y, P @ y)))
            x = y
            if val <= prev + 1e-15:
                break
            prev = val
        if prev > best:
            best, arg = prev, x
    return best, arg


def polar_gauge_psd(P, theory, restarts: int = 16, seed: int = 0) -> PolarGauge:
    """Polar gauge of a PSD operator: ``max <sigma, P>`` over free states, clipped at 0."""
    P = linalg.check_hermitian(np.asarray(P, dtype=complex))
    if np.linalg.eigvalsh(P)[0] < -1e-9:
        raise ValueError("operator is not positive semidefinite")
    if P.shape[0] != theory.dim:
        raise ValueError(f"operator has dimension {P.shape[0]}, theory {theory} expects {theory.dim}")
    if theory.is_polytope:
        poly = build_polytope(theory)
        vals = poly.expectations(P)
        i = int(np.argmax(vals))
        v = max(0.0, float(vals[i]))
        return PolarGauge(v, v, poly.vectors[i])
    if isinstance(theory, CoherenceK):
        best, arg = 0.0, None
        for I in combinations(range(theory.d), theory.k):
            w, vec = np.linalg.eigh(P[np.ix_(I, I)])
            if w[-1] > best:
                best = float(w[-1])
                arg = np.zeros(theory.d, dtype=complex)
                arg[list(I)] = vec[:, -1]
        return PolarGauge(best, best, arg)
    w, vec = np.linalg.eigh(P)
    if w[-2] <= 1e-12 * max(1.0, w[-1]):
        # rank one: reduces to the pure-state polar gauge
        val = float(w[-1]) * gauges.pure_polar(vec[:, -1], theory)
        return PolarGauge(val, val, None)
    rng = np.random.default_rng(seed)
    if isinstance(theory, SchmidtK):
        best, arg = _best_low_rank(P, theory.dA, theory.dB, theory.k, restarts, rng)
        return PolarGauge(max(best, 0.0), max(best, 0.0), arg, exact=False)
    if isinstance(theory, GenuineMultipartite):
        from .theories import bipartitions

        dims = theory.dims
        best, arg = -np.inf, None
        for left, right in bipartitions(len(dims)):
            perm = list(left) + list(right)
            dl = int(np.prod([dims[i] for i in left]))
            t = P.reshape(dims + dims).transpose(perm + [p + len(dims) for p in perm]).reshape(P.shape)
            val, x = _best_low_rank(t, dl, theory.dim // dl, 1, restarts, rng)
            if val > best:
                best, arg = val, x
        return PolarGauge(max(best, 0.0), max(best, 0.0), None, exact=False)
    raise UnsupportedError(f"no polar gauge for {theory}")


def cross_polar(P, theory) -> float:
    """``max_{i,j} |<v_i|P|v_j>|`` over free vertex pairs (polytope theories)."""
    poly = _polytope(theory)
    M = poly.vectors.conj() @ P @ poly.vectors.T
    return float(np.abs(M).max())


# -- witnesses -----------------------------------------------------------

@dataclass
class WitnessCheck:
    """Feasibility residuals of a witness and the bound it certifies.

    ``free_min`` is ``min <W, sigma>`` over free states (feasible when
    ``>= 0``); ``upper_slack`` is ``lambda_min(I - W)`` for generalised
    witnesses and ``1 - max <W, sigma_i>`` for standard ones.  ``bound`` is
    ``-<rho, W>``.
    """

    free_min: float
    upper_slack: float
    bound: float

    @property
    def residual(self) -> float:
        return max(0.0, -self.free_min, -self.upper_slack)

    def feasible(self, tol: float = 1e-7) -> bool:
        return self.residual <= tol


def _free_expectation_range(W, theory) -> tuple[float, float]:
    if theory.is_polytope:
        vals = build_polytope(theory).expectations(W)
        return float(vals.min()), float(vals.max())
    if isinstance(theory, CoherenceK):
        lo, hi = np.inf, -np.inf
        for I in combinations(range(theory.d), theory.k):
            w = np.linalg.eigvalsh(W[np.ix_(I, I)])
            lo, hi = min(lo, w[0]), max(hi, w[-1])
        return float(lo), float(hi)
    raise UnsupportedError(f"witness checks are not available for {theory}")


def witness_validate(W, rho, theory, kind: str = "generalized") -> WitnessCheck:
    W = linalg.check_hermitian(np.asarray(W, dtype=complex))
    rho = as_density(rho)
    lo, hi = _free_expectation_range(W, theory)
    if kind == "generalized":
        slack = float(np.linalg.eigvalsh(np.eye(W.shape[0]) - W)[0])
    elif kind == "standard":
        slack = 1.0 - hi
    else:
        raise ValueError(f"unknown witness kind {kind!r}")
    return WitnessCheck(free_min=lo, upper_slack=slack, bound=float(-np.real(np.vdot(W, rho))))


MEASURES = {
    "standard_robustness": standard_robustness,
    "base_gauge": base_gauge,
    "generalized_robustness": generalized_robustness,
    "log_generalized_robustness": log_generalized_robustness,
    "random_robustness": random_robustness,
    "best_free_approximation": best_free_approximation,
    "modified_trace_distance": modified_trace_distance,
    "nuclear_gauge": nuclear_gauge,
    "convex_roof_upper": convex_roof_upper,
    "geometric_measure": geometric_measure,
}
