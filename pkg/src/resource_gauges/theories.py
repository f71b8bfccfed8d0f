"""Free-state sets: descriptors, stabilizer enumeration, polytope dictionaries."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import linalg
from .solvers.simplex import INFEASIBLE, LinearProgram, simplex_solve

PHASE_TOL = 1e-9
DEDUP_TOL = 1e-10


class UnsupportedError(ValueError):
    """Requested computation is not available for this theory or input."""


@dataclass(frozen=True)
class CoherenceK:
    d: int
    k: int = 1

    def __post_init__(self):
        if not 1 <= self.k <= self.d:
            raise ValueError(f"need 1 <= k <= d, got k={self.k}, d={self.d}")

    @property
    def dim(self) -> int:
        return self.d

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.d,)

    @property
    def is_polytope(self) -> bool:
        return self.k == 1

    def __str__(self) -> str:
        return f"coherence:d={self.d},k={self.k}"


@dataclass(frozen=True)
class SchmidtK:
    dA: int
    dB: int
    k: int = 1

    def __post_init__(self):
        if not 1 <= self.k <= min(self.dA, self.dB):
            raise ValueError(f"need 1 <= k <= min(dA, dB), got k={self.k}")

    @property
    def dim(self) -> int:
        return self.dA * self.dB

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.dA, self.dB)

    is_polytope = False

    def __str__(self) -> str:
        return f"schmidt:dA={self.dA},dB={self.dB},k={self.k}"


@dataclass(frozen=True)
class GenuineMultipartite:
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) < 2:
            raise ValueError("need at least two parties")
        if len(self.dims) > 12:
            raise ValueError("at most 12 parties supported")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    is_polytope = False

    def __str__(self) -> str:
        return "genuine:dims=" + "x".join(str(d) for d in self.dims)


@dataclass(frozen=True)
class MagicQubits:
    n: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError("magic theory supports n in {1, 2, 3}")

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) * self.n

    is_polytope = True

    def __str__(self) -> str:
        return f"magic:n={self.n}"


@dataclass(frozen=True, eq=False)
class CustomPolytope:
    """Free states given explicitly as a list of unit vectors (e.g. a loaded stabilizer file)."""

    vectors: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("dictionary vectors must have unit norm")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.dim,)

    is_polytope = True

    def __str__(self) -> str:
        return f"{self.label}:vertices={self.vectors.shape[0]},d={self.dim}"


Theory = CoherenceK | SchmidtK | GenuineMultipartite | MagicQubits | CustomPolytope

_THEORY_RE = re.compile(r"^\s*(\w+)\s*:\s*(.*?)\s*$")


def parse_theory(spec: str) -> Theory:
    """Parse ``coherence:d=3,k=1``, ``schmidt:dA=2,dB=2,k=1``, ``genuine:dims=2x2x2``, ``magic:n=1``."""
    m = _THEORY_RE.match(spec)
    if not m:
        raise ValueError(f"cannot parse theory {spec!r}")
    kind, rest = m.group(1).lower(), m.group(2)
    fields = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        if "=" not in item:
            raise ValueError(f"bad field {item!r} in theory {spec!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        fields[key] = val
    required = {"coherence": {"d", "k"}, "schmidt": {"dA", "dB", "k"}, "genuine": {"dims"}, "magic": {"n"}}
    if kind not in required:
        raise ValueError(f"unknown theory kind {kind!r}")
    if set(fields) != required[kind]:
        raise ValueError(f"theory {spec!r} needs exactly the fields {sorted(required[kind])}")
    if kind == "coherence":
        return CoherenceK(int(fields["d"]), int(fields["k"]))
    if kind == "schmidt":
        return SchmidtK(int(fields["dA"]), int(fields["dB"]), int(fields["k"]))
    if kind == "genuine":
        return GenuineMultipartite(tuple(int(x) for x in fields["dims"].split("x")))
    return MagicQubits(int(fields["n"]))


# -- stabilizer states ---------------------------------------------------

def canonical_phase(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v) > PHASE_TOL))
    out = v * (abs(v[k]) / v[k])
    out[np.abs(out.real) < 1e-13] = 1j * out.imag[np.abs(out.real) < 1e-13]
    out[np.abs(out.imag) < 1e-13] = out.real[np.abs(out.imag) < 1e-13]
    return out + (0.0 + 0.0j)  # no negative zeros


def _on_qubit(gate: np.ndarray, q: int, n: int) -> np.ndarray:
    ops = [gate if i == q else np.eye(2) for i in range(n)]
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def _cnot(control: int, target: int, n: int) -> np.ndarray:
    d = 2**n
    perm = np.zeros((d, d), dtype=complex)
    for b in range(d):
        bits = [(b >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control]:
            bits[target] ^= 1
        perm[sum(bit << (n - 1 - q) for q, bit in enumerate(bits)), b] = 1.0
    return perm


def clifford_generators(n: int) -> list[np.ndarray]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.diag([1, 1j])
    gens = []
    for q in range(n):
        gens += [_on_qubit(h, q, n), _on_qubit(s, q, n)]
    for c in range(n):
        for t in range(n):
            if c != t:
                gens.append(_cnot(c, t, n))
    return gens


@lru_cache(maxsize=None)
def _stabilizers_cached(n: int) -> np.ndarray:
    gens = clifford_generators(n)
    start = np.zeros(2**n, dtype=complex)
    start[0] = 1.0
    found = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = canonical_phase(g @ v)
                known = np.array(found)
                if np.max(np.abs(known.conj() @ w)) > 1.0 - DEDUP_TOL:
                    continue
                found.append(w)
                nxt.append(w)
        frontier = nxt
    out = np.array(found)
    out.setflags(write=False)
    return out


def stabilizer_enumerate(n: int) -> np.ndarray:
    """All n-qubit pure stabilizer states, one row each, canonical global phase.

    Breadth-first closure of |0...0> under H, S and CNOT.  Counts are
    6, 60 and 1080 for n = 1, 2, 3.
    """
    if n not in (1, 2, 3):
        raise ValueError("stabilizer enumeration supports n in {1, 2, 3}")
    return _stabilizers_cached(n).copy()


# -- polytopes -----------------------------------------------------------

@dataclass(frozen=True)
class PolytopeFreeSet:
    """Vertex states of a polytope of free states.

    ``vectors`` holds one unit vector per row; ``dictionary`` is its transpose
    (columns = free states).  ``coords`` are the real Hermitian coordinates of
    the vertex projectors, one column per vertex.
    """

    vectors: np.ndarray
    exact: bool = True

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dictionary(self) -> np.ndarray:
        return self.vectors.T

    @property
    def projectors(self) -> np.ndarray:
        v = self.vectors
        return np.einsum("ki,kj->kij", v, v.conj())

    @property
    def coords(self) -> np.ndarray:
        return np.array([linalg.hermitian_coords(p) for p in self.projectors]).T

    def overlaps(self, psi: np.ndarray) -> np.ndarray:
        """``|<v_i|psi>|^2`` for every vertex."""
        return np.abs(self.vectors.conj() @ np.asarray(psi, dtype=complex)) ** 2

    def expectations(self, m: np.ndarray) -> np.ndarray:
        """``<v_i|M|v_i>`` for every vertex (real part)."""
        v = self.vectors
        return np.einsum("ki,ij,kj->k", v.conj(), m, v).real


@lru_cache(maxsize=None)
def build_polytope(theory: Theory) -> PolytopeFreeSet:
    if isinstance(theory, MagicQubits):
        return PolytopeFreeSet(_stabilizers_cached(theory.n))
    if isinstance(theory, CoherenceK) and theory.k == 1:
        return PolytopeFreeSet(np.eye(theory.d, dtype=complex))
    if isinstance(theory, CustomPolytope):
        return PolytopeFreeSet(theory.vectors)
    raise UnsupportedError(f"{theory} has a continuum of free states, not a polytope")


def vertex_sum_direction(poly: PolytopeFreeSet) -> np.ndarray | None:
    """Weights ``u >= 0`` with ``sum_i u_i |v_i><v_i| = I``, if the uniform mixture is maximally mixed."""
    u = np.full(poly.size, poly.dim / poly.size)
    total = np.tensordot(u, poly.projectors, axes=1)
    if np.allclose(total, np.eye(poly.dim), atol=1e-10):
        return u
    return None


# -- membership ----------------------------------------------------------

@dataclass
class MembershipCertificate:
    inside: bool
    weights: np.ndarray | None = None
    witness: np.ndarray | None = None


def free_membership(rho: np.ndarray, theory: Theory) -> MembershipCertificate:
    """Decide ``rho in conv(free states)`` by LP feasibility.

    Inside: nonnegative vertex weights reproducing ``rho``.  Outside: a
    Hermitian witness ``W`` with ``<W, sigma_i> >= 0`` on every vertex and
    ``<W, rho> < 0``, read off the phase-one Farkas multipliers.
    """
    rho = linalg.check_hermitian(rho)
    if not theory.is_polytope:
        if np.linalg.matrix_rank(rho, tol=1e-9) == 1:
            w, v = np.linalg.eigh(rho)
            return MembershipCertificate(pure_free_test(v[:, -1], theory))
        raise UnsupportedError(f"mixed-state membership for {theory} is not supported")
    poly = build_polytope(theory)
    A = poly.coords
    b = linalg.hermitian_coords(rho)
    sol = simplex_solve(LinearProgram(c=np.zeros(poly.size), A_eq=A, b_eq=b))
    if sol.status == INFEASIBLE:
        y = sol.farkas
        w = -linalg.from_hermitian_coords(y, poly.dim)
        w = w / max(np.max(np.abs(np.linalg.eigvalsh(w))), 1e-300)
        return MembershipCertificate(False, witness=w)
    return MembershipCertificate(True, weights=sol.x)


def bipartitions(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """The ``2**(n-1) - 1`` splits of ``n`` parties, each listed once (party 0 always on the left)."""
    out = []
    rest = list(range(1, n))
    for size in range(0, n - 1):
        for extra in combinations(rest, size):
            left = (0,) + extra
            right = tuple(i for i in range(n) if i not in left)
            out.append((left, right))
    return out


def pure_free_test(psi: np.ndarray, theory: Theory, tol: float = 1e-9) -> bool:
    from . import gauges

    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if isinstance(theory, CoherenceK):
        return gauges.coherence_rank(psi, tol) <= theory.k
    if isinstance(theory, SchmidtK):
        lam = linalg.schmidt_decompose(psi, theory.dA, theory.dB).coefficients
        return int(np.count_nonzero(lam > tol)) <= theory.k
    if isinstance(theory, GenuineMultipartite):
        for left, right in bipartitions(len(theory.dims)):
            lam = gauges.split_schmidt(psi, theory.dims, left, right)
            if np.count_nonzero(lam > tol) == 1:
                return True
        return False
    if isinstance(theory, (MagicQubits, CustomPolytope)):
        return bool(build_polytope(theory).overlaps(psi).max() >= 1.0 - tol)
    raise UnsupportedError(f"unknown theory {theory!r}")
