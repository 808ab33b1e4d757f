"""Dense statevector simulation.

States are 1-D complex arrays of length ``2**n`` with qubit 0 as the most
significant bit of the index.  Global phases are kept as computed.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .gates import Chromosome, GateKind, GateSpec, InvalidGateError
from .kernels import evolve_states, gene_matrices

NORM_TOL = 1e-9


def num_qubits_of(state: np.ndarray) -> int:
    dim = np.shape(state)[-1]
    n = int(dim).bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise ValueError(f"state length {dim} is not a power of two >= 2")
    return n


def zero_state(num_qubits: int) -> np.ndarray:
    state = np.zeros(1 << num_qubits, dtype=np.complex128)
    state[0] = 1.0
    return state


def basis_state(bits: str) -> np.ndarray:
    """``basis_state("101")`` is |101>, qubit 0 written first."""
    state = np.zeros(1 << len(bits), dtype=np.complex128)
    state[int(bits, 2)] = 1.0
    return state


def monomial_form(unitary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a monomial matrix ``U`` into ``(perm, phase)`` with
    ``(U @ psi)[i] == phase[i] * psi[perm[i]]``."""
    u = np.asarray(unitary, dtype=np.complex128)
    perm = np.argmax(np.abs(u), axis=1)
    phase = u[np.arange(u.shape[0]), perm]
    rebuilt = np.zeros_like(u)
    rebuilt[np.arange(u.shape[0]), perm] = phase
    if not np.allclose(rebuilt, u, atol=1e-12, rtol=0):
        raise ValueError("oracle unitary is not a monomial matrix")
    return perm.astype(np.int64), phase


def _oracle_arrays(oracle, dim: int):
    if oracle is None:
        return np.arange(dim)[None, :], np.ones((1, dim), dtype=np.complex128)
    unitary = getattr(oracle, "unitary", oracle)
    if np.shape(unitary) != (dim, dim):
        raise InvalidGateError(f"oracle of shape {np.shape(unitary)} on {dim}-dim register")
    perm, phase = monomial_form(unitary)
    return perm[None, :], phase[None, :]


def _run(states: np.ndarray, chromosome: Sequence[GateSpec], num_qubits: int, oracle) -> np.ndarray:
    chromosome = Chromosome(chromosome)
    chromosome.check(num_qubits)
    if oracle is None and any(g.kind == GateKind.ORACLE for g in chromosome):
        raise InvalidGateError("circuit calls the oracle but none was supplied")
    if not chromosome:
        return states
    kinds, targets, controls, angles = (a[None] for a in chromosome.to_arrays())
    mats = gene_matrices(kinds, angles)
    n_cols = states.shape[0]
    perm, phase = _oracle_arrays(oracle, states.shape[1])
    perms = np.repeat(perm, n_cols, axis=0)
    phases = np.repeat(phase, n_cols, axis=0)
    out = evolve_states(states[None].copy(), kinds, targets, controls, mats, perms, phases, num_qubits)
    return out[0]


def apply_gate(state: np.ndarray, gate: GateSpec, oracle=None) -> np.ndarray:
    """Return ``gate`` applied to ``state``.  ``oracle`` (an OracleSpec or a
    unitary) is needed only for oracle genes."""
    state = np.asarray(state, dtype=np.complex128)
    return _run(state[None], [gate], num_qubits_of(state), oracle)[0]


def run_circuit(chromosome: Sequence[GateSpec], num_qubits: int, oracle=None) -> np.ndarray:
    """Final state of ``chromosome`` started from |0...0>."""
    return _run(zero_state(num_qubits)[None], chromosome, num_qubits, oracle)[0]


def measure_probabilities(state: np.ndarray, measured_qubits: Sequence[int]) -> np.ndarray:
    """Marginal outcome distribution over ``measured_qubits``.

    Outcome index bits follow the order of ``measured_qubits`` (first listed
    qubit is the most significant bit).  Leading batch axes are allowed.
    """
    measured = list(measured_qubits)
    n = num_qubits_of(state)
    if not measured:
        raise ValueError("no qubits to measure")
    if len(set(measured)) != len(measured) or not all(0 <= q < n for q in measured):
        raise ValueError(f"invalid measured qubits {measured} for {n} qubits")
    state = np.asarray(state)
    batch = state.shape[:-1]
    probs = (state.real**2 + state.imag**2).reshape(batch + (2,) * n)
    off = len(batch)
    rest = [q for q in range(n) if q not in measured]
    probs = probs.sum(axis=tuple(off + q for q in rest)) if rest else probs
    # remaining axes are in ascending qubit order; reorder to `measured`
    kept = sorted(measured)
    probs = np.moveaxis(probs, [off + kept.index(q) for q in measured], range(off, off + len(measured)))
    return probs.reshape(batch + (1 << len(measured),))


def extract_unitary(
    chromosome: Sequence[GateSpec], num_qubits: int, start_index: int = 0, oracle=None
) -> np.ndarray:
    """Matrix of the genes ``chromosome[start_index:]`` in application order."""
    if not 0 <= start_index <= len(chromosome):
        raise IndexError(f"start_index {start_index} outside chromosome of length {len(chromosome)}")
    dim = 1 << num_qubits
    columns = _run(np.eye(dim, dtype=np.complex128), list(chromosome)[start_index:], num_qubits, oracle)
    return columns.T


def gate_unitary(gate: GateSpec, num_qubits: int, oracle=None) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix of a single gene."""
    return extract_unitary([gate], num_qubits, 0, oracle)


def is_unitary(matrix: np.ndarray, tol: float = NORM_TOL) -> bool:
    m = np.asarray(matrix)
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) < tol)
