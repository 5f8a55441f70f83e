from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import settings

from qwalknet.circuit import Circuit
from qwalknet.graph import generate_er
from qwalknet.sim import run_gates

settings.register_profile("ci", max_examples=30, deadline=None)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def er10():
    return generate_er(10, 0.3, seed=42)


def dense_unitary(circuit: Circuit) -> np.ndarray:
    """Column k is the circuit applied to basis state k."""
    dim = 1 << circuit.n_qubits
    cols = []
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1.0
        cols.append(run_gates(circuit, e))
    return np.stack(cols, axis=1)
