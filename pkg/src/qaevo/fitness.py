"""Fitness functions for evolved circuits (lower is better).

``baseline``
    Passed test cases first, then gate economy.
``direct``
    As baseline, plus the ratio of oracle calls to the classical number of
    oracle calls once every test case passes.
``indirect``
    As baseline, plus a ``#TestCases + 1`` penalty for each of the two
    structural constraints (a superposition-capable gate, a controlled
    gate) the circuit violates.

A test case passes when the probability of its target outcome is at least
:data:`HIT_THRESHOLD`.  Failing cases add the Jensen-Shannon distance
between produced and target distributions to the error term.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .gates import CONTROLLED, SUPERPOSITION, Chromosome, GateKind, GateSpec
from .kernels import evolve_states, gene_matrices, zero_states
from .problems import ProblemSuite
from .sim import measure_probabilities

HIT_THRESHOLD = 0.52
GATE_WEIGHT = 1.0 / 100000
FITNESS_MODES = ("baseline", "direct", "indirect")

_SUPERPOSITION_CODES = np.array(sorted(int(k) for k in SUPERPOSITION))
_CONTROLLED_CODES = np.array(sorted(int(k) for k in CONTROLLED))


@dataclass(frozen=True)
class FitnessReport:
    fitness: float
    hits_remaining: int
    error_sum: float
    penalty: float
    oracle_ratio: float
    gate_term: float

    def to_dict(self) -> dict:
        return asdict(self)


def jensen_shannon_distance(p, q) -> np.ndarray | float:
    """Square root of the base-2 Jensen-Shannon divergence along the last axis."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    m = 0.5 * (p + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_p = np.where(p > 0, p * np.log2(p / m), 0.0).sum(axis=-1)
        kl_q = np.where(q > 0, q * np.log2(q / m), 0.0).sum(axis=-1)
    div = np.clip(0.5 * (kl_p + kl_q), 0.0, 1.0)
    out = np.sqrt(div)
    return float(out) if out.ndim == 0 else out


def contains_superposition_gates(chromosome: Sequence[GateSpec]) -> bool:
    return any(g.kind in SUPERPOSITION for g in chromosome)


def contains_entanglement_gates(chromosome: Sequence[GateSpec]) -> bool:
    return any(g.kind in CONTROLLED for g in chromosome)


# ---------------------------------------------------------------- batched core

def population_probabilities(kinds, targets, controls, angles, suite: ProblemSuite, backend=None):
    """Outcome distributions, shape ``(P, #TestCases, 2**len(measured))``."""
    kinds = np.atleast_2d(kinds)
    perms, phases = suite.oracle_arrays()
    states = zero_states(kinds.shape[0], len(suite), 1 << suite.num_qubits)
    mats = gene_matrices(kinds, np.atleast_2d(angles))
    states = evolve_states(
        states, kinds, np.atleast_2d(targets), np.atleast_2d(controls), mats,
        perms, phases, suite.num_qubits, backend=backend,
    )
    return measure_probabilities(states, suite.measured_qubits)


def hits_and_error(probabilities: np.ndarray, suite: ProblemSuite):
    """``(hits_remaining, error_sum)`` arrays from ``(P, C, K)`` distributions."""
    idx = suite.target_indices
    cases = np.arange(len(suite))
    target_prob = probabilities[:, cases, idx]
    passed = target_prob >= HIT_THRESHOLD
    hits = len(suite) - passed.sum(axis=1)
    dist = jensen_shannon_distance(probabilities, np.broadcast_to(suite.targets, probabilities.shape))
    error = np.where(passed, 0.0, dist).sum(axis=1)
    return hits.astype(np.int64), error


def score_arrays(kinds, targets, controls, angles, suite: ProblemSuite, mode: str, backend=None):
    """Fitness components for a population in array form.

    Returns a dict of ``(P,)`` arrays keyed like :class:`FitnessReport`.
    """
    if mode not in FITNESS_MODES:
        raise ValueError(f"unknown fitness mode {mode!r}")
    kinds = np.atleast_2d(kinds)
    probs = population_probabilities(kinds, targets, controls, angles, suite, backend)
    hits, error = hits_and_error(probs, suite)
    n_gates = (kinds != int(GateKind.IDENTITY)).sum(axis=1)
    n_oracle = (kinds == int(GateKind.ORACLE)).sum(axis=1)
    solved = hits == 0

    hit_term = hits + error / np.maximum(hits, 1)
    gate_term = np.where(solved, n_gates * GATE_WEIGHT, 0.0)
    oracle_ratio = np.zeros(len(hits))
    if mode == "direct":
        oracle_ratio = np.where(solved, n_oracle / suite.classical_oracle_calls, 0.0)
    penalty = np.zeros(len(hits))
    if mode == "indirect":
        per = len(suite) + 1
        penalty = per * (
            (~np.isin(kinds, _SUPERPOSITION_CODES).any(axis=1)).astype(float)
            + (~np.isin(kinds, _CONTROLLED_CODES).any(axis=1)).astype(float)
        )
    fitness = penalty + np.where(solved, oracle_ratio + gate_term, hit_term)
    return {
        "fitness": fitness,
        "hits_remaining": hits,
        "error_sum": error,
        "penalty": penalty,
        "oracle_ratio": oracle_ratio,
        "gate_term": gate_term,
    }


# ---------------------------------------------------------------- single circuits

def _check(chromosome, suite: ProblemSuite) -> Chromosome:
    chromosome = Chromosome(chromosome)
    chromosome.check(suite.num_qubits)
    return chromosome


def evaluate_hits(chromosome: Sequence[GateSpec], suite: ProblemSuite) -> tuple[int, float]:
    chromosome = _check(chromosome, suite)
    probs = population_probabilities(*chromosome.to_arrays(), suite)
    hits, error = hits_and_error(probs, suite)
    return int(hits[0]), float(error[0])


def fitness_report(chromosome: Sequence[GateSpec], suite: ProblemSuite, mode: str) -> FitnessReport:
    chromosome = _check(chromosome, suite)
    s = score_arrays(*chromosome.to_arrays(), suite, mode)
    return FitnessReport(
        fitness=float(s["fitness"][0]),
        hits_remaining=int(s["hits_remaining"][0]),
        error_sum=float(s["error_sum"][0]),
        penalty=float(s["penalty"][0]),
        oracle_ratio=float(s["oracle_ratio"][0]),
        gate_term=float(s["gate_term"][0]),
    )


def baseline_fitness(chromosome, suite: ProblemSuite) -> FitnessReport:
    return fitness_report(chromosome, suite, "baseline")


def direct_qa_fitness(chromosome, suite: ProblemSuite) -> FitnessReport:
    if suite.classical_oracle_calls <= 0:
        raise ValueError("classical oracle call count must be positive")
    return fitness_report(chromosome, suite, "direct")


def indirect_qa_fitness(chromosome, suite: ProblemSuite) -> FitnessReport:
    return fitness_report(chromosome, suite, "indirect")


FITNESS_FUNCTIONS = {
    "baseline": baseline_fitness,
    "direct": direct_qa_fitness,
    "indirect": indirect_qa_fitness,
}
