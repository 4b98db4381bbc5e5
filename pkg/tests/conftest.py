# /tests/conftest.py
# Fixtures compartidas: generadores con semilla fija y canales de referencia.

import numpy as np
import pytest
from hypothesis import strategies as st

from strongconverse import channels, linalg

SEEDS = st.integers(min_value=0, max_value=2 ** 32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def qubit_pair(rng):
    return linalg.random_density(2, seed=rng), linalg.random_density(2, seed=rng)


@pytest.fixture
def eb_depolarizing():
    return channels.depolarizing(0.25)


@pytest.fixture
def noiseless_qubit():
    return channels.identity(2)


@pytest.fixture
def qubit_replacement():
    return channels.replacement(np.eye(2) / 2, 2)


def binary_entropy(p):
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
