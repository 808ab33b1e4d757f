import numpy as np
import pytest

from dense import ALL_KINDS
from qaevo import _accel
from qaevo.gates import GateKind, random_gene_arrays
from qaevo.kernels import evolve_states, gene_matrices, zero_states
from qaevo.problems import make_bv_suite, make_search_suite

needs_numba = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")


def _batch(suite, pop, length, seed):
    rng = np.random.default_rng(seed)
    gate_set = ALL_KINDS | {GateKind.ORACLE}
    kinds, targets, controls, angles = random_gene_arrays((pop, length), suite.num_qubits, gate_set, rng)
    perms, phases = suite.oracle_arrays()
    states = zero_states(pop, len(suite), 1 << suite.num_qubits)
    mats = gene_matrices(kinds, angles)
    return states, kinds, targets, controls, mats, perms, phases


@needs_numba
@pytest.mark.parametrize("suite", [make_bv_suite(3), make_search_suite(3), make_bv_suite(2)])
def test_backends_agree(suite):
    args = _batch(suite, 40, 25, seed=7)
    a = evolve_states(args[0].copy(), *args[1:], suite.num_qubits, backend="numba")
    b = evolve_states(args[0].copy(), *args[1:], suite.num_qubits, backend="numpy")
    assert np.max(np.abs(a - b)) < 1e-12
    assert np.allclose(np.linalg.norm(a, axis=-1), 1.0, atol=1e-9)


def test_unknown_backend():
    suite = make_bv_suite(1)
    args = _batch(suite, 1, 1, seed=0)
    with pytest.raises(ValueError):
        evolve_states(*args, suite.num_qubits, backend="cuda")


def test_env_flag_selects_backend(monkeypatch):
    monkeypatch.setenv("QAEVO_DISABLE_NUMBA", "1")
    assert _accel.numba_enabled() is False
    monkeypatch.setenv("QAEVO_DISABLE_NUMBA", "0")
    assert _accel.numba_enabled() is _accel.HAS_NUMBA


def test_gene_matrices_shape():
    kinds = np.array([[int(GateKind.RX), int(GateKind.H)]])
    mats = gene_matrices(kinds, np.array([[np.pi, 0.0]]))
    assert mats.shape == (1, 2, 2, 2)
    assert np.allclose(mats[0, 0], [[0, -1j], [-1j, 0]], atol=1e-12)
