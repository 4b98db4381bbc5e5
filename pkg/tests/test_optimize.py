# /tests/test_optimize.py

import logging

import numpy as np
import pytest

from strongconverse import channels, linalg
from strongconverse.divergences import conjugated_channel, one_to_alpha_norm
from strongconverse.optimize import (
    COARSE_GRID,
    PureStateObjective,
    batch_log2_trace_power,
    bloch_grid,
    maximize_over_pure_states,
    parallel_map,
)


class _FlatAscent(PureStateObjective):
    """Gradiente nulo: el ascenso se queda en `level`, la rejilla vale `level + lift·|ψ₀|²`."""

    def __init__(self, kmap, level, lift):
        super().__init__(kmap)
        self.level = level
        self.lift = lift

    def value_and_gradient(self, p):
        return self.level, np.zeros_like(p)

    def batch_values(self, ps):
        return self.level + self.lift * np.real(ps[:, 0, 0])


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(10), threads=4) == [x * x for x in range(10)]


def test_bloch_grid_states_are_normalized():
    psis = bloch_grid(5, 9)
    assert psis.shape == (45, 2)
    assert np.allclose(np.linalg.norm(psis, axis=1), 1.0)


def test_batch_trace_power_is_stable_for_large_orders():
    values = batch_log2_trace_power(np.array([[0.5, 0.5], [1.0, 0.0]]), 512.0)
    assert values == pytest.approx([1.0 - 512.0, 0.0])


def test_grid_point_is_returned_when_it_beats_the_ascent(caplog):
    objective = _FlatAscent(channels.identity(2), 0.0, 1.0)
    with caplog.at_level(logging.WARNING, logger="strongconverse.optimize"):
        value, psi, grid_best = maximize_over_pure_states(objective, 2, seed=1, grid=COARSE_GRID)
    assert grid_best == pytest.approx(1.0)
    assert value == grid_best
    assert abs(psi[0]) == pytest.approx(1.0)
    assert "la rejilla supera al ascenso" in caplog.text


def test_tiny_grid_excess_is_silent(caplog):
    objective = _FlatAscent(channels.identity(2), 0.5, 5e-10)
    with caplog.at_level(logging.WARNING, logger="strongconverse.optimize"):
        value, _, grid_best = maximize_over_pure_states(objective, 2, seed=1, grid=COARSE_GRID)
    assert value == grid_best > 0.5
    assert "la rejilla supera al ascenso" not in caplog.text


@pytest.mark.parametrize("alpha", [1.5, 2.0, 4.0])
def test_norm_of_conjugated_channel_matches_certification_grid(alpha):
    rng = np.random.default_rng(41)
    s = linalg.fractional_power(linalg.random_density(2, seed=rng), -0.25)
    kmap = conjugated_channel(s, channels.random_channel(2, 2, seed=rng))
    estimate = one_to_alpha_norm(kmap, alpha, budget=4, seed=1)
    assert estimate.grid_value is not None
    assert estimate.value >= estimate.grid_value
    assert estimate.value - estimate.grid_value <= 1e-4 * max(1.0, estimate.value)
