"""Oracle problem suites: Bernstein-Vazirani and unstructured search.

Register layout (qubit 0 = most significant index bit):

* Bernstein-Vazirani on ``n`` input bits uses ``n + 1`` qubits; qubits
  ``0..n-1`` hold the input ``x`` and qubit ``n`` is the ancilla.  The
  oracle maps ``|x>|a> -> |x>|a XOR s.x>``; targets live on the input
  register only (the ancilla is marginalized out).
* Search on ``n`` qubits uses a phase oracle ``diag(+1, ..., -1 at m, ...)``
  and targets the full register.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .sim import monomial_form


@dataclass(frozen=True)
class OracleSpec:
    problem: str
    parameter: int
    num_qubits: int
    unitary: np.ndarray = field(repr=False)

    @property
    def monomial(self) -> tuple[np.ndarray, np.ndarray]:
        return monomial_form(self.unitary)

    def label(self, width: int) -> str:
        return format(self.parameter, f"0{width}b")


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    oracle: OracleSpec
    target: np.ndarray = field(repr=False)
    measured_qubits: tuple[int, ...]

    @property
    def target_index(self) -> int:
        return int(np.argmax(self.target))


@dataclass(frozen=True)
class ProblemSuite:
    problem: str
    num_qubits: int
    test_cases: tuple[TestCase, ...]
    classical_oracle_calls: float
    measured_qubits: tuple[int, ...]

    def __len__(self):
        return len(self.test_cases)

    def oracle_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked ``(perms, phases)`` of every oracle, shape ``(C, 2**n)``."""
        cached = self.__dict__.get("_oracle_arrays")
        if cached is None:
            pairs = [tc.oracle.monomial for tc in self.test_cases]
            cached = (np.stack([p for p, _ in pairs]), np.stack([ph for _, ph in pairs]))
            object.__setattr__(self, "_oracle_arrays", cached)
        return cached

    @property
    def target_indices(self) -> np.ndarray:
        return np.array([tc.target_index for tc in self.test_cases], dtype=np.int64)

    @property
    def targets(self) -> np.ndarray:
        return np.stack([tc.target for tc in self.test_cases])

    @property
    def input_bits(self) -> int:
        return len(self.measured_qubits)

    def to_dict(self) -> dict[str, Any]:
        width = self.input_bits
        return {
            "problem": self.problem,
            "num_qubits": self.num_qubits,
            "measured_qubits": list(self.measured_qubits),
            "classical_oracle_calls": self.classical_oracle_calls,
            "test_cases": [
                {
                    "parameter": tc.oracle.label(width),
                    "target_index": tc.target_index,
                }
                for tc in self.test_cases
            ],
        }


def _one_hot(index: int, size: int) -> np.ndarray:
    target = np.zeros(size)
    target[index] = 1.0
    return target


def bv_oracle(hidden: int, n_input_bits: int) -> OracleSpec:
    dim = 1 << (n_input_bits + 1)
    unitary = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        x, a = col >> 1, col & 1
        parity = bin(x & hidden).count("1") & 1
        unitary[(x << 1) | (a ^ parity), col] = 1.0
    return OracleSpec("bv", hidden, n_input_bits + 1, unitary)


def search_oracle(marked: int, n_qubits: int) -> OracleSpec:
    diag = np.ones(1 << n_qubits, dtype=np.complex128)
    diag[marked] = -1.0
    return OracleSpec("search", marked, n_qubits, np.diag(diag))


def make_bv_suite(n_input_bits: int) -> ProblemSuite:
    if n_input_bits < 1:
        raise ValueError("need at least one input bit")
    measured = tuple(range(n_input_bits))
    cases = tuple(
        TestCase(bv_oracle(s, n_input_bits), _one_hot(s, 1 << n_input_bits), measured)
        for s in range(1 << n_input_bits)
    )
    return ProblemSuite("bv", n_input_bits + 1, cases, float(n_input_bits), measured)


def make_search_suite(n_qubits: int) -> ProblemSuite:
    if n_qubits < 2:
        raise ValueError("search needs at least two qubits")
    measured = tuple(range(n_qubits))
    dim = 1 << n_qubits
    cases = tuple(
        TestCase(search_oracle(m, n_qubits), _one_hot(m, dim), measured) for m in range(dim)
    )
    return ProblemSuite("search", n_qubits, cases, dim / 2, measured)


def make_suite(problem: str, size: int) -> ProblemSuite:
    """``size`` is the input-bit count for BV and the qubit count for search."""
    if problem == "bv":
        return make_bv_suite(size)
    if problem == "search":
        return make_search_suite(size)
    raise ValueError(f"unknown problem {problem!r}")
