import json
from pathlib import Path

import numpy as np
import pytest

from qmac_capacity.quantum.channels import collective_phase_flip, erasure_mac
from qmac_capacity.quantum.linalg import SubsystemLayout
from qmac_capacity.quantum.states import CqEnsemble, basis_state
from qmac_capacity.regions.optimizer import OptimizerConfig


@pytest.fixture
def rng():
    """
    Provide a seeded numpy Generator so every test draws the same random objects.

    Returns:
        numpy.random.Generator: generator seeded with 1234.
    """
    return np.random.default_rng(1234)


@pytest.fixture
def erasure2():
    """Erasure MAC with a qubit for Bob (|A'| = 2, |B'| = 2, |C| = 3)."""
    return erasure_mac(2)


@pytest.fixture
def phase_flip01():
    """Collective phase-flip channel at p = 0.1."""
    return collective_phase_flip(0.1)


@pytest.fixture
def erasure_ensemble():
    """
    Build the erasure-pattern ensemble {q: |0>, 1 - q: |1>} on Alice's qubit.

    Returns:
        Callable[[float], CqEnsemble]: factory taking the erasure probability q.
    """
    def make(q):
        states = (basis_state(0, 2, "A'"), basis_state(1, 2, "A'"))
        return CqEnsemble(np.array([q, 1 - q]), states)
    return make


@pytest.fixture
def small_config():
    """Optimizer configuration scaled down for fast unit tests."""
    return OptimizerConfig(restarts=2, max_iters=300, weights=5, seed=7, regularized_restarts=0)


@pytest.fixture
def write_json_file(tmp_path):
    """
    Write a JSON document under the test's temporary directory.

    Returns:
        Callable[[str, object], Path]: writer taking a file name and a JSON-serializable object.
    """
    def write(name, obj):
        path = Path(tmp_path) / name
        path.write_text(json.dumps(obj), encoding="utf-8")
        return path
    return write


@pytest.fixture
def bipartite_qubits():
    """Two-qubit layout labelled A, B."""
    return SubsystemLayout((2, 2), ("A", "B"))
