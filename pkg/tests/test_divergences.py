# /tests/test_divergences.py

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SEEDS
from strongconverse import channels, linalg
from strongconverse.divergences import (
    conditional_mutual_information,
    conjugated_channel,
    ensemble_alpha_holevo,
    mutual_information,
    nagaoka_bound,
    one_to_alpha_norm,
    register_mutual_information,
    relative_entropy,
    sandwiched_renyi,
    theta_conjugation,
    verify_king,
    verify_nagaoka,
    von_neumann_entropy,
)
from strongconverse.errors import InvalidOrder, InvalidParameter, NotSeparableInput
from strongconverse.states import BipartiteCut, bell_state, ket, projector, random_povm

ALPHAS = (0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 3.0, 5.0)


def _pair(seed, d):
    rng = np.random.default_rng(seed)
    return linalg.random_density(d, seed=rng), linalg.random_density(d, seed=rng), rng


def test_divergence_of_state_with_itself_is_zero(qubit_pair):
    rho, _ = qubit_pair
    for alpha in ALPHAS:
        assert sandwiched_renyi(rho, rho, alpha) == pytest.approx(0.0, abs=1e-10)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)


def test_invalid_orders():
    rho = np.eye(2) / 2
    for alpha in (1.0, 0.0, -0.5, np.inf):
        with pytest.raises(InvalidOrder):
            sandwiched_renyi(rho, rho, alpha)


def test_commuting_states_reduce_to_classical_renyi():
    p, q = np.array([0.7, 0.2, 0.1]), np.array([0.3, 0.3, 0.4])
    for alpha in ALPHAS:
        expected = np.log2(np.sum(p ** alpha * q ** (1 - alpha))) / (alpha - 1)
        assert sandwiched_renyi(np.diag(p), np.diag(q), alpha) == pytest.approx(expected, abs=1e-12)
    assert relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(np.sum(p * np.log2(p / q)), abs=1e-12)


def test_support_conditions():
    rho = np.diag([0.5, 0.5])
    sigma = np.diag([1.0, 0.0])
    assert sandwiched_renyi(rho, sigma, 2.0) == np.inf
    assert relative_entropy(rho, sigma) == np.inf
    assert np.isfinite(sandwiched_renyi(rho, sigma, 0.5))
    assert sandwiched_renyi(projector(ket(1, 2)), sigma, 0.5) == np.inf


@given(seed=SEEDS, d=st.sampled_from([2, 3, 4]))
@settings(max_examples=30, deadline=None)
def test_monotone_in_alpha(seed, d):
    rho, sigma, _ = _pair(seed, d)
    values = [sandwiched_renyi(rho, sigma, a) for a in ALPHAS[:3]]
    values.append(relative_entropy(rho, sigma))
    values.extend(sandwiched_renyi(rho, sigma, a) for a in ALPHAS[3:])
    assert all(b >= a - 1e-8 for a, b in zip(values, values[1:]))


@given(seed=SEEDS, alpha=st.sampled_from(ALPHAS))
@settings(max_examples=30, deadline=None)
def test_data_processing(seed, alpha):
    rho, sigma, rng = _pair(seed, 3)
    ch = channels.random_channel(3, 2, seed=rng)
    after = sandwiched_renyi(ch.apply_to(rho), ch.apply_to(sigma), alpha)
    assert after <= sandwiched_renyi(rho, sigma, alpha) + 1e-7


@given(seed=SEEDS)
@settings(max_examples=20, deadline=None)
def test_limit_at_one_is_relative_entropy(seed):
    rho, sigma, _ = _pair(seed, 2)
    d = relative_entropy(rho, sigma)
    assert abs(sandwiched_renyi(rho, sigma, 1 + 1e-4) - d) <= 1e-3
    assert abs(sandwiched_renyi(rho, sigma, 1 - 1e-4) - d) <= 1e-3


def test_entropies_and_mutual_information():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert mutual_information(bell_state(2), BipartiteCut(2, 2)) == pytest.approx(2.0)
    ghz = np.zeros(8, dtype=complex)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    rho = np.outer(ghz, ghz.conj())
    assert register_mutual_information(rho, [2, 2, 2], [0], [1]) == pytest.approx(1.0)
    assert conditional_mutual_information(rho, [2, 2, 2], ([0], [1], [2])) == pytest.approx(1.0)
    product = np.kron(np.kron(bell_state(2), np.eye(2) / 2), np.eye(2) / 2)
    assert conditional_mutual_information(product, [2, 2, 2, 2], ([0], [2], [3])) == pytest.approx(0.0, abs=1e-12)


def test_theta_conjugation_preserves_overlap(qubit_pair):
    rho, sigma = qubit_pair
    assert np.trace(theta_conjugation(sigma, rho)).real == pytest.approx(np.trace(sigma @ rho).real, abs=1e-10)


def test_nagaoka_bound_edges():
    assert nagaoka_bound(0.0, 0.5, 2.0) == -np.inf
    assert nagaoka_bound(0.5, 0.0, 2.0) == np.inf
    with pytest.raises(InvalidOrder):
        nagaoka_bound(0.5, 0.5, 1.0)


@given(seed=SEEDS, alpha=st.floats(min_value=1.01, max_value=5.0))
@settings(max_examples=60, deadline=None)
def test_nagaoka_inequality_holds(seed, alpha):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    rho, sigma = linalg.random_density(d, seed=rng), linalg.random_density(d, seed=rng)
    effect = random_povm(d, 2, seed=rng).elements[0]
    assert verify_nagaoka(rho, sigma, effect, alpha)


def test_nagaoka_rejects_invalid_effect():
    with pytest.raises(InvalidParameter):
        verify_nagaoka(np.eye(2) / 2, np.eye(2) / 2, 2 * np.eye(2), 2.0)


def test_one_to_alpha_norm_exact_cases(rng):
    ch = channels.random_channel(2, 2, seed=rng)
    assert one_to_alpha_norm(ch, 1.0).value == pytest.approx(1.0, abs=1e-10)
    s = np.diag([2.0, 0.5])
    conj = conjugated_channel(s, channels.identity(2))
    assert one_to_alpha_norm(conj, 1.0).value == pytest.approx(4.0)
    assert one_to_alpha_norm(channels.identity(2), 2.0, budget=2, seed=1).value == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(InvalidOrder):
        one_to_alpha_norm(ch, 0.5)


@pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0, 4.0])
def test_king_inequality_on_separable_operators(alpha):
    rng = np.random.default_rng(int(alpha * 10))
    kmap = conjugated_channel(linalg.random_hermitian(2, seed=rng), channels.random_channel(2, 2, seed=rng))
    terms = [(0.5 * linalg.random_density(2, seed=rng), linalg.random_density(2, seed=rng)) for _ in range(3)]
    check = verify_king(kmap, terms, alpha, budget=2, seed=3)
    assert check
    assert check.details["nu"] > 0


def test_king_rejects_non_psd_terms():
    kmap = channels.identity(2)
    with pytest.raises(NotSeparableInput):
        verify_king(kmap, [(np.diag([1.0, -1.0]), np.eye(2))], 2.0)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 4.0])
def test_alpha_holevo_of_orthogonal_ensemble(alpha):
    states = np.array([projector(ket(0, 2)), projector(ket(1, 2))])
    value, sigma = ensemble_alpha_holevo([0.5, 0.5], states, alpha)
    assert value == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(sigma, np.eye(2) / 2, atol=1e-6)
