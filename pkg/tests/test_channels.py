# /tests/test_channels.py

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import SEEDS
from strongconverse import channels, linalg
from strongconverse.errors import DimensionMismatch, InvalidParameter, NotCPTP
from strongconverse.states import DensityOperator, Povm, ket, projector


def test_depolarizing_action(qubit_pair):
    rho, _ = qubit_pair
    out = channels.depolarizing(0.4).apply_to(rho)
    assert np.allclose(out, 0.4 * rho + 0.6 * np.eye(2) / 2, atol=1e-12)


def test_depolarizing_parameter_range():
    with pytest.raises(InvalidParameter):
        channels.depolarizing(1.5)
    channels.depolarizing(-1.0 / 3.0)


def test_non_trace_preserving_kraus_is_rejected():
    with pytest.raises(NotCPTP):
        channels.KrausChannel((2.0 * np.eye(2),))
    kmap = channels.KrausMap((2.0 * np.eye(2),))
    assert kmap.tp_deviation() == pytest.approx(3.0)


@given(seed=SEEDS)
@settings(max_examples=25, deadline=None)
def test_choi_round_trip(seed):
    """Kraus → Choi → Kraus conserva la acción del canal."""
    rng = np.random.default_rng(seed)
    ch = channels.random_channel(2, 3, seed=rng)
    rho = linalg.random_density(2, seed=rng)
    choi = channels.to_choi(ch)
    assert np.allclose(choi.apply_to(rho), ch.apply_to(rho), atol=1e-10)
    assert np.allclose(channels.from_choi(choi).apply_to(rho), ch.apply_to(rho), atol=1e-9)


def test_choi_trace_condition():
    with pytest.raises(NotCPTP):
        channels.ChoiMatrix(np.eye(4) / 2, 2, 2)


def test_measure_prepare_channel(rng):
    povm = Povm((projector(ket(0, 2)), projector(ket(1, 2))))
    sigma = linalg.random_density(3, seed=rng)
    mp = channels.MeasurePrepareChannel(povm, (np.eye(3) / 3, sigma))
    out = mp.apply_to(np.diag([0.25, 0.75]))
    assert np.allclose(out, 0.25 * np.eye(3) / 3 + 0.75 * sigma, atol=1e-12)
    assert channels.is_entanglement_breaking(mp) == channels.EbVerdict.EB


@pytest.mark.parametrize("lam,verdict", [
    (0.2, channels.EbVerdict.EB),
    (1.0 / 3.0, channels.EbVerdict.EB),
    (0.5, channels.EbVerdict.NOT_EB),
    (1.0, channels.EbVerdict.NOT_EB),
])
def test_depolarizing_eb_verdict(lam, verdict):
    assert channels.is_entanglement_breaking(channels.depolarizing(lam)) == verdict


def test_qutrit_ppt_verdict_is_inconclusive():
    verdict = channels.is_entanglement_breaking(channels.depolarizing(0.1, 3))
    assert verdict == channels.EbVerdict.INCONCLUSIVE


def test_eb_boundary_of_depolarizing_family():
    boundary = channels.eb_boundary(channels.depolarizing, 0.0, 1.0)
    assert abs(boundary - 1.0 / 3.0) <= 1e-9
    with pytest.raises(InvalidParameter):
        channels.eb_boundary(channels.depolarizing, 0.5, 1.0)


def test_apply_on_registers_acts_locally(rng):
    a = linalg.random_density(3, seed=rng)
    b = linalg.random_density(2, seed=rng)
    ch = channels.random_channel(2, 2, seed=rng)
    out, dims = channels.apply_on_registers(ch, np.kron(a, b), [3, 2], 1)
    assert dims == [3, 2]
    assert np.allclose(out, np.kron(a, ch.apply_to(b)), atol=1e-12)
    with pytest.raises(DimensionMismatch):
        channels.apply_on_registers(ch, np.kron(a, b), [3, 2], 0)


def test_apply_returns_density_operator(qubit_pair):
    rho, _ = qubit_pair
    out = channels.apply(channels.dephasing(0.5), rho)
    assert isinstance(out, DensityOperator)
    assert abs(out.matrix[0, 1]) < 1e-12


def test_compose_and_tensor(qubit_pair):
    rho, sigma = qubit_pair
    dep = channels.depolarizing(0.5)
    twice = channels.compose(dep, dep)
    assert np.allclose(twice.apply_to(rho), channels.depolarizing(0.25).apply_to(rho), atol=1e-12)
    both = channels.tensor_channels(dep, channels.identity(2))
    assert np.allclose(both.apply_to(np.kron(rho, sigma)), np.kron(dep.apply_to(rho), sigma), atol=1e-12)


def test_binary_symmetric_and_replacement(rng):
    bsc = channels.binary_symmetric(0.1)
    assert np.allclose(bsc.apply_to(projector(ket(0, 2))), np.diag([0.9, 0.1]))
    omega = linalg.random_density(2, seed=rng)
    rep = channels.replacement(omega, 3)
    assert np.allclose(rep.apply_to(linalg.random_density(3, seed=rng)), omega, atol=1e-12)


def test_white_noise_endpoints(rng):
    ch = channels.random_channel(2, 2, seed=rng)
    rho = linalg.random_density(2, seed=rng)
    assert np.allclose(channels.white_noise(ch, 1.0).apply_to(rho), ch.apply_to(rho), atol=1e-12)
    assert np.allclose(channels.white_noise(ch, 0.0).apply_to(rho), np.eye(2) / 2, atol=1e-12)


def test_random_eb_channel_is_eb_by_construction():
    ch = channels.random_eb_channel(3, 2, seed=5)
    assert ch.is_eb_by_construction
    assert channels.is_entanglement_breaking(ch) == channels.EbVerdict.EB
