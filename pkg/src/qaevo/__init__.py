"""Evolutionary synthesis of oracle-based quantum circuits.

Circuits are fixed-length gate chromosomes evolved by a genetic algorithm
against one of three fitness functions: a baseline (test cases, then gate
count), one that also charges oracle calls relative to the classical
algorithm, and one that penalizes circuits lacking superposition-capable or
controlled gates.
"""
from .evolve import GAConfig, GenerationStats, Population, run_experiment, step_generation
from .fitness import (
    FitnessReport,
    baseline_fitness,
    direct_qa_fitness,
    indirect_qa_fitness,
    jensen_shannon_distance,
)
from .gates import Chromosome, GateKind, GateSpec
from .problems import make_bv_suite, make_search_suite
from .sim import extract_unitary, measure_probabilities, run_circuit

__version__ = "0.1.0"
