import numpy as np
import pytest
from hypothesis import given, strategies as st

from resource_gauges import linalg


seeds = st.integers(0, 2**31 - 1)


def random_hermitian(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T


@given(seeds, st.integers(1, 8))
def test_jacobi_matches_lapack(seed, d):
    m = random_hermitian(d, np.random.default_rng(seed))
    w, v = linalg.jacobi_eigh(m)
    assert np.allclose(w, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-10)
    assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-10)
    assert np.allclose((v * w) @ v.conj().T, m, atol=1e-9)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_hermitian_eig_ordering_and_reconstruction(method, rng):
    m = random_hermitian(6, rng)
    spec = linalg.hermitian_eig(m, method=method)
    assert np.all(np.diff(spec.eigenvalues) <= 1e-12)
    assert np.allclose(spec.reconstruct(), m, atol=1e-9)


def test_jacobi_degenerate_spectrum():
    m = np.diag([2.0, 2.0, -1.0, -1.0]).astype(complex)
    u = np.linalg.qr(np.arange(16).reshape(4, 4) + 1j * np.eye(4))[0]
    w, _ = linalg.jacobi_eigh(u @ m @ u.conj().T)
    assert np.allclose(w, [2, 2, -1, -1], atol=1e-10)


def test_validators_reject_bad_input():
    with pytest.raises(ValueError):
        linalg.check_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        linalg.check_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        linalg.check_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        linalg.check_state_vector([1.0, 1.0])
    with pytest.raises(ValueError):
        linalg.check_hermitian(np.ones((2, 3)))


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_schmidt_matches_svd(seed, dA, dB):
    psi = linalg.sample_pure(dA * dB, seed)
    sd = linalg.schmidt_decompose(psi, dA, dB)
    sv = np.linalg.svd(psi.reshape(dA, dB), compute_uv=False)
    assert np.allclose(sd.coefficients, sv, atol=1e-12)
    assert np.allclose(sd.reconstruct(), psi, atol=1e-10)
    assert np.isclose(np.sum(sd.coefficients**2), 1.0)


def test_schmidt_product_state_has_exact_zeros(rng):
    a = linalg.sample_pure(3, rng)
    b = linalg.sample_pure(4, rng)
    sd = linalg.schmidt_decompose(np.kron(a, b), 3, 4)
    assert sd.rank() == 1
    assert np.all(sd.coefficients[1:] == 0.0)
    assert np.allclose(sd.reconstruct(), np.kron(a, b))


def test_partial_transpose_and_trace(rng):
    rho = linalg.sample_mixed((2, 3), seed=rng)
    pt = linalg.partial_transpose(rho, (2, 3), 1)
    t = rho.reshape(2, 3, 2, 3)
    assert np.allclose(pt, t.transpose(0, 3, 2, 1).reshape(6, 6))
    assert np.allclose(linalg.partial_transpose(pt, (2, 3), 1), rho)
    assert np.allclose(linalg.partial_trace(rho, (2, 3), [0]), np.einsum("ajbj->ab", t))
    assert np.allclose(linalg.partial_trace(rho, (2, 3), [1]), np.einsum("iaib->ab", t))
    with pytest.raises(ValueError):
        linalg.partial_trace(rho, (2, 2), [0])


def test_trace_norm_of_partial_transpose_of_bell_state():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    pt = linalg.partial_transpose(linalg.projector(bell), (2, 2))
    assert np.isclose(linalg.trace_norm(pt), 2.0)


@given(seeds)
def test_root_fidelity_properties(seed):
    rng = np.random.default_rng(seed)
    rho = linalg.sample_mixed(3, seed=rng)
    sigma = linalg.sample_mixed(3, seed=rng)
    f = linalg.root_fidelity(rho, sigma)
    assert 0.0 <= f <= 1.0
    assert np.isclose(f, linalg.root_fidelity(sigma, rho), atol=1e-8)
    assert np.isclose(linalg.root_fidelity(rho, rho), 1.0, atol=1e-8)
    psi = linalg.sample_pure(3, rng)
    assert np.isclose(linalg.root_fidelity(linalg.projector(psi), sigma) ** 2,
                      np.vdot(psi, sigma @ psi).real, atol=1e-8)


def test_psd_sqrt_and_inverse(rng):
    rho = linalg.sample_mixed(4, seed=rng)
    s = linalg.psd_sqrt(rho)
    assert np.allclose(s @ s, rho, atol=1e-12)
    si = linalg.psd_inv_sqrt(rho)
    assert np.allclose(si @ rho @ si, np.eye(4), atol=1e-8)


@given(seeds, st.integers(1, 5))
def test_hermitian_coords_round_trip(seed, d):
    m = random_hermitian(d, np.random.default_rng(seed))
    c = linalg.hermitian_coords(m)
    assert np.allclose(linalg.from_hermitian_coords(c, d), m)
    basis = linalg.hermitian_basis(d)
    direct = np.array([np.trace(b @ m).real for b in basis])
    assert np.allclose(c, direct)
    gram = np.einsum("aij,bji->ab", basis, basis).real
    assert np.allclose(gram, np.eye(d * d))


def test_samplers_are_states_and_seeded():
    psi = linalg.sample_pure((2, 3), seed=5)
    assert np.isclose(np.linalg.norm(psi), 1.0)
    assert np.array_equal(psi, linalg.sample_pure((2, 3), seed=5))
    rho = linalg.sample_mixed(4, rank=2, seed=1)
    linalg.check_density(rho)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2
