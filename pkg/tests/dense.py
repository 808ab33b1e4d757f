"""Brute-force dense simulator used as an independent oracle in tests.

Builds every gate as a full Kronecker product from its own 2x2 definitions;
shares nothing with the package's kernels.
"""
import math

import numpy as np

from qaevo.gates import Chromosome, GateKind, random_gene_arrays

I2 = np.eye(2, dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
r2 = 1 / math.sqrt(2)
PAULI = {
    "H": np.array([[r2, r2], [r2, -r2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def single(name, theta=None):
    if name in PAULI:
        return PAULI[name]
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    gen = PAULI[name[1]]
    return c * I2 - 1j * s * gen  # exp(-i theta/2 G)


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def gate_matrix(gate, n, oracle_unitary=None):
    kind = gate.kind
    if kind == GateKind.IDENTITY:
        return np.eye(2**n, dtype=complex)
    if kind == GateKind.ORACLE:
        return np.asarray(oracle_unitary, dtype=complex)
    name = kind.name
    if gate.control is None:
        mats = [I2] * n
        mats[gate.target] = single(name, gate.angle)
        return kron_all(mats)
    base = name[1:]
    off = [I2] * n
    off[gate.control] = P0
    on = [I2] * n
    on[gate.control] = P1
    on[gate.target] = single(base, gate.angle)
    return kron_all(off) + kron_all(on)


def circuit_matrix(genes, n, oracle_unitary=None):
    u = np.eye(2**n, dtype=complex)
    for g in genes:
        u = gate_matrix(g, n, oracle_unitary) @ u
    return u


def run(genes, n, oracle_unitary=None):
    return circuit_matrix(genes, n, oracle_unitary)[:, 0]


ALL_KINDS = frozenset(k for k in GateKind if k != GateKind.ORACLE)


def random_chromosome(rng, n, length, gate_set=ALL_KINDS):
    return Chromosome.from_arrays(*random_gene_arrays((length,), n, gate_set, rng))
