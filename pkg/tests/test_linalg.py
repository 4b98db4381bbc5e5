# /tests/test_linalg.py

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SEEDS
from strongconverse import linalg
from strongconverse.errors import InvalidOrder, NegativeEigenvalue, NonHermitian, NonSquare


@given(seed=SEEDS, d=st.integers(min_value=1, max_value=6))
@settings(max_examples=40, deadline=None)
def test_jacobi_matches_lapack(seed, d):
    """Los autovalores de Jacobi coinciden con LAPACK y la descomposición reconstruye M."""
    m = linalg.random_hermitian(d, seed=seed)
    jac = linalg.eigh(m, method="jacobi")
    lap = linalg.eigh(m, method="lapack")
    assert np.allclose(jac.eigenvalues, lap.eigenvalues, atol=1e-9)
    assert np.allclose(jac.reconstruct(), m, atol=1e-9)
    v = jac.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-9)


def test_eigh_orders_descending():
    spec = linalg.eigh(np.diag([0.2, 0.7, 0.1]))
    assert np.allclose(spec.eigenvalues, [0.7, 0.2, 0.1])


def test_eigh_rejects_non_hermitian_and_non_square():
    with pytest.raises(NonHermitian):
        linalg.eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NonSquare):
        linalg.eigh(np.ones((2, 3)))


def test_psd_spectrum_rejects_negative_eigenvalue():
    with pytest.raises(NegativeEigenvalue):
        linalg.psd_spectrum(np.diag([1.0, -0.1]))


def test_negative_power_lives_on_support():
    """Para rango incompleto M^{-1}·M es el proyector del soporte."""
    psi = np.array([1.0, 1.0j]) / np.sqrt(2)
    m = np.outer(psi, psi.conj())
    inv = linalg.fractional_power(m, -1.0)
    assert np.allclose(inv @ m, m, atol=1e-12)
    assert np.allclose(linalg.support_projector(m), m, atol=1e-12)


def test_schatten_norms():
    m = np.diag([0.5, -0.25, 0.0])
    assert linalg.schatten_norm(m, 1) == pytest.approx(0.75)
    assert linalg.schatten_norm(m, 2) == pytest.approx(np.sqrt(0.25 + 0.0625))
    assert linalg.schatten_norm(m, np.inf) == pytest.approx(0.5)
    with pytest.raises(InvalidOrder):
        linalg.schatten_norm(m, 0.5)


def test_log2_trace_power_large_order():
    value = linalg.log2_trace_power([0.5, 0.5, 0.0], 1e6)
    assert value == pytest.approx(-1e6 + 1.0)
    assert linalg.log2_trace_power([0.0, 0.0], 2.0) == -np.inf


def test_partial_trace_and_permutation(rng):
    a = linalg.random_density(2, seed=rng)
    b = linalg.random_density(3, seed=rng)
    ab = linalg.kron(a, b)
    assert np.allclose(linalg.partial_trace(ab, [2, 3], [0]), a)
    assert np.allclose(linalg.partial_trace(ab, [2, 3], [1]), b)
    assert np.allclose(linalg.permute_systems(ab, [2, 3], [1, 0]), linalg.kron(b, a))


def test_spawn_seeds_are_deterministic():
    first = [np.random.default_rng(s).random() for s in linalg.spawn_seeds(7, 3)]
    second = [np.random.default_rng(s).random() for s in linalg.spawn_seeds(7, 3)]
    assert first == second
    assert len(set(first)) == 3


def test_random_density_is_state(rng):
    rho = linalg.random_density(4, rank=2, seed=rng)
    w = np.linalg.eigvalsh(rho)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert w.min() > -1e-12
    assert np.sum(w > 1e-10) == 2
