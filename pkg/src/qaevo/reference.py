"""Hand-built reference circuits expressed in the evolvable gate set.

The gate set has at most one control per gate, so the three-qubit diffusion
operator is assembled from phase polynomials: a doubly-controlled Z costs
three CRZ, two CX and one RZ, and carries a global phase of ``exp(-+i pi/8)``.
Two such blocks with opposite phases make the diffusion suffix exactly real:
it equals ``CCZ @ (2|s><s| - I)``, i.e. the diffusion operator with its last
row negated.
"""
from __future__ import annotations

import math

import numpy as np

from .gates import ORACLE, Chromosome, GateKind, GateSpec

PI = math.pi

# Diffusion operator with rows 1 and 3 negated; this sign pattern is what an
# evolved single-oracle search circuit was observed to produce.
SIGNED_DIFFUSION_REFERENCE = np.full((8, 8), 0.25)
np.fill_diagonal(SIGNED_DIFFUSION_REFERENCE, -0.75)
SIGNED_DIFFUSION_REFERENCE[[1, 3]] *= -1


def diffusion_matrix(num_qubits: int) -> np.ndarray:
    """``2|s><s| - I`` over the uniform superposition ``|s>``."""
    dim = 1 << num_qubits
    return np.full((dim, dim), 2.0 / dim) - np.eye(dim)


def _h_layer(qubits):
    return [GateSpec(GateKind.H, q) for q in qubits]


def textbook_bv(n_input_bits: int = 3, length: int | None = None) -> Chromosome:
    """Hadamard layer, ancilla prepared in |->, one oracle call, Hadamard layer."""
    inputs = range(n_input_bits)
    ancilla = n_input_bits
    genes = (
        _h_layer(inputs)
        + [GateSpec(GateKind.X, ancilla), GateSpec(GateKind.H, ancilla), ORACLE]
        + _h_layer(inputs)
    )
    return Chromosome(genes) if length is None else Chromosome.padded(genes, length)


def ccz_block(a: int, b: int, c: int, sign: int = 1) -> list[GateSpec]:
    """Doubly-controlled Z on (a, b, c) with global phase ``exp(-sign*i*pi/8)``."""
    s = 1 if sign > 0 else -1
    return [
        GateSpec(GateKind.CRZ, b, a, s * PI / 2),
        GateSpec(GateKind.CRZ, c, a, s * PI / 2),
        GateSpec(GateKind.CX, c, b),
        GateSpec(GateKind.CRZ, c, a, -s * PI / 2),
        GateSpec(GateKind.CX, c, b),
        GateSpec(GateKind.RZ, a, None, s * PI / 4),
    ]


def diffusion_suffix() -> list[GateSpec]:
    """24 genes implementing ``CCZ @ (2|s><s| - I)`` on three qubits, exactly real.

    ``2|0><0| - I`` is ``(-1)**(a+b+c+ab+ac+bc+abc)``: three Z, three CZ and
    one CCZ block.
    """
    reflect_zero = (
        [GateSpec(GateKind.Z, q) for q in range(3)]
        + [GateSpec(GateKind.CZ, 1, 0), GateSpec(GateKind.CZ, 2, 0), GateSpec(GateKind.CZ, 2, 1)]
        + ccz_block(0, 1, 2, +1)
    )
    return _h_layer(range(3)) + reflect_zero + _h_layer(range(3)) + ccz_block(0, 1, 2, -1)


def textbook_grover(length: int | None = None) -> Chromosome:
    """One Grover iteration on three qubits: H layer, oracle, diffusion (28 genes)."""
    genes = _h_layer(range(3)) + [ORACLE] + diffusion_suffix()
    return Chromosome(genes) if length is None else Chromosome.padded(genes, length)


def oracle_suffix_start(chromosome) -> int:
    """Index just after the last oracle call (0 when there is none)."""
    last = -1
    for i, g in enumerate(chromosome):
        if g.kind == GateKind.ORACLE:
            last = i
    return last + 1


def row_signs(matrix: np.ndarray, reference: np.ndarray, tol: float = 1e-9):
    """Per-row signs ``s`` with ``matrix == diag(s) @ reference`` within ``tol``
    entrywise, or None when no such signs exist."""
    m = np.asarray(matrix)
    ref = np.asarray(reference)
    if m.shape != ref.shape:
        return None
    signs = []
    for row, ref_row in zip(m, ref):
        for s in (1, -1):
            if np.max(np.abs(row - s * ref_row)) < tol:
                signs.append(s)
                break
        else:
            return None
    return np.array(signs)
