"""Shared fixtures for symplecta tests."""

import json

import numpy as np
import pytest

from symplecta.pipeline import OscillatorNetwork
from symplecta.quantum import QuantumNetwork


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def two_osc():
    """ω = (1, 1), g = -0.5: Ω = (√1.5, √0.5)."""
    return OscillatorNetwork.two(1.0, 1.0, -0.5)


@pytest.fixture
def star4():
    return OscillatorNetwork(diag_freq=[1.3, 0.8, 1.1, 1.7], couplings=[-0.3, -0.2, -0.4])


@pytest.fixture
def symmetric_pair():
    """Two degenerate quantum modes coupled by g = -0.1."""
    return QuantumNetwork(g_diag=[1.0, 1.0], g_couple=[-0.1])


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document into ``tmp_path`` and return its path as a string."""

    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return _write
