"""Small dense complex linear algebra used throughout the package.

Everything here works on plain numpy arrays.  Matrices are assumed small
(dimension up to a few dozen), so clarity wins over asymptotic speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
NORM_TOL = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in nonincreasing order and matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        mat = (self.left * self.coefficients) @ self.right.T
        return mat.reshape(-1)

    def rank(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(self.coefficients > tol))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    scale = 1.0 + np.max(np.abs(m), initial=0.0)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return m


def check_density(rho: np.ndarray, trace_tol: float = TRACE_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    rho = check_hermitian(rho)
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise ValueError(f"trace is {np.trace(rho).real}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -psd_tol:
        raise ValueError("matrix is not positive semidefinite")
    return rho


def check_state_vector(psi: np.ndarray, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise ValueError("state vector is not normalised")
    return psi


def _check_dims(dims: Sequence[int], total: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != total:
        raise ValueError(f"dims {dims} do not multiply to {total}")
    return dims


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def jacobi_eigh(m: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Each step applies a 2x2 unitary rotation that zeroes one off-diagonal
    pair.  Sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||m||_F``.  Returns ``(w, v)`` with ``w`` nonincreasing.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    target = tol * max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * mag, aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                # columns p, q of the rotation
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eig(m: np.ndarray, method: str = "lapack", tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues nonincreasing.

    ``method="jacobi"`` uses :func:`jacobi_eigh`; the default calls LAPACK.
    """
    m = check_hermitian(m, tol)
    m = 0.5 * (m + m.conj().T)
    if method == "jacobi":
        w, v = jacobi_eigh(m)
    elif method == "lapack":
        w, v = np.linalg.eigh(m)
        w, v = w[::-1], v[:, ::-1]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return SpectralDecomposition(w, v)


def psd_sqrt(m: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Matrix square root with eigenvalues clipped at ``floor``."""
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.sqrt(np.clip(w, floor, None))
    return (v * w) @ v.conj().T


def psd_inv_sqrt(m: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = 1.0 / np.sqrt(np.clip(w, floor, None))
    return (v * w) @ v.conj().T


def _orthonormal_completion(cols: np.ndarray, dim: int, count: int) -> np.ndarray:
    """Extend orthonormal ``cols`` (dim x j) by ``count`` further orthonormal columns."""
    if count == 0:
        return cols
    proj = np.eye(dim, dtype=complex) - cols @ cols.conj().T
    w, v = np.linalg.eigh(proj)
    extra = v[:, np.argsort(-w, kind="stable")[:count]]
    return np.hstack([cols, extra])


def schmidt_decompose(psi: np.ndarray, dA: int, dB: int, zero_tol: float = 1e-12) -> SchmidtData:
    """Schmidt decomposition from the eigendecomposition of the A marginal.

    Coefficients are zero-padded to ``min(dA, dB)``; coefficients below
    ``zero_tol`` are set to exactly zero.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dA * dB:
        raise ValueError(f"state of length {psi.size} does not match dims ({dA}, {dB})")
    mat = psi.reshape(dA, dB)
    n = min(dA, dB)
    w, u = np.linalg.eigh(mat @ mat.conj().T)
    order = np.argsort(-w, kind="stable")[:n]
    w, u = w[order], u[:, order]
    # ||mat^* u_i|| keeps absolute accuracy where sqrt(w_i) would amplify round-off
    lam = np.linalg.norm(mat.conj().T @ u, axis=0)
    lam[lam < zero_tol] = 0.0
    nz = int(np.count_nonzero(lam))
    right = (mat.T @ u[:, :nz].conj()) / lam[:nz]
    right = _orthonormal_completion(right.reshape(dB, nz), dB, n - nz)
    return SchmidtData(lam, u, right)


def partial_transpose(rho: np.ndarray, dims: Sequence[int], subsystem: int = 1) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(dims, rho.shape[0])
    n = len(dims)
    if not 0 <= subsystem < n:
        raise ValueError(f"subsystem {subsystem} out of range for {n} factors")
    t = rho.reshape(dims + dims)
    t = np.swapaxes(t, subsystem, n + subsystem)
    return t.reshape(rho.shape)


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(dims, rho.shape[0])
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise ValueError("keep set must be nonempty")
    if any(not 0 <= k < n for k in keep):
        raise ValueError(f"keep indices {keep} out of range")
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[i] for i in range(n)]
    col = [letters[i] if i not in keep else letters[n + i].upper() for i in range(n)]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    res = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    dk = int(np.prod([dims[k] for k in keep]))
    return res.reshape(dk, dk)


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(check_hermitian(m)))))


def root_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``|| sqrt(rho) sqrt(sigma) ||_1``; the squared fidelity convention is its square."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    s = psd_sqrt(rho)
    inner = s @ sigma @ s
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(min(np.sum(np.sqrt(np.clip(w, 0.0, None))), 1.0))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_pure(dims: Sequence[int] | int, seed=None) -> np.ndarray:
    """Haar-random pure state: normalised complex Gaussian amplitudes."""
    d = int(np.prod(dims))
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def sample_mixed(dims: Sequence[int] | int, rank: int | None = None, seed=None) -> np.ndarray:
    """Reduced state of a Haar-random purification with ``rank``-dimensional environment."""
    d = int(np.prod(dims))
    rank = d if rank is None else int(rank)
    if not 1 <= rank:
        raise ValueError("rank must be positive")
    if rank > d:
        raise ValueError("rank exceeds dimension")
    psi = sample_pure(d * rank, seed).reshape(d, rank)
    rho = psi @ psi.conj().T
    return 0.5 * (rho + rho.conj().T)


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d Hermitian matrices, shape (d*d, d, d).

    Coordinates of ``X`` are ``Re tr(B_k X)``; this is what turns Hermitian
    matrix equations into real linear equations.
    """
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1 / np.sqrt(2)
            basis.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[i, j] = 1j / np.sqrt(2)
            f[j, i] = -1j / np.sqrt(2)
            basis.append(f)
    return np.array(basis)


def hermitian_coords(m: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in :func:`hermitian_basis`."""
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    iu = np.triu_indices(d, 1)
    upper = m[iu]
    out = np.empty(d * d)
    out[:d] = np.diag(m).real
    out[d::2] = np.sqrt(2) * upper.real
    out[d + 1 :: 2] = np.sqrt(2) * upper.imag
    return out


def from_hermitian_coords(c: np.ndarray, d: int) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    m = np.zeros((d, d), dtype=complex)
    m[np.diag_indices(d)] = c[:d]
    iu = np.triu_indices(d, 1)
    vals = (c[d::2] + 1j * c[d + 1 :: 2]) / np.sqrt(2)
    m[iu] = vals
    m[(iu[1], iu[0])] = vals.conj()
    return m
