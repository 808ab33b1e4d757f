"""Acceptance criteria, one test per criterion.

A ``[PASS]``/``[FAIL]``/``[SKIP]`` line per criterion is printed in the
terminal summary (see ``conftest.py``).  Criterion 6 runs only with
``QAEVO_FULL_SCALE=1``.
"""
import math
import os
import time

import numpy as np
import pytest

import dense
from dense import ALL_KINDS, random_chromosome
from qaevo.evolve import GAConfig, run_experiment
from qaevo.fitness import (
    baseline_fitness,
    contains_entanglement_gates,
    contains_superposition_gates,
    direct_qa_fitness,
    evaluate_hits,
    indirect_qa_fitness,
    jensen_shannon_distance,
)
from qaevo.gates import CONTROLLED, PARAMETERIZED, Chromosome, GateKind, GateSpec, count_gates
from qaevo.problems import make_bv_suite, make_search_suite
from qaevo.reference import (
    SIGNED_DIFFUSION_REFERENCE,
    oracle_suffix_start,
    row_signs,
    textbook_bv,
    textbook_grover,
)
from qaevo.sim import extract_unitary, gate_unitary, measure_probabilities, run_circuit

criterion = pytest.mark.criterion


@pytest.fixture(scope="module", autouse=True)
def _warm_kernels():
    # JIT compilation is a one-off per process; keep it out of the timed sections
    baseline_fitness(textbook_bv(1), make_bv_suite(1))


@criterion(1, "fitness-oracle exactness (textbook BV and Grover)")
def test_c1_fitness_oracle_exactness():
    t0 = time.perf_counter()
    bv3, search3 = make_bv_suite(3), make_search_suite(3)

    bv = textbook_bv(3, 15)
    report = baseline_fitness(bv, bv3)
    assert report.hits_remaining == 0
    assert report.fitness == count_gates(bv) / 100000

    grover = textbook_grover(30)
    for tc in search3.test_cases:
        probs = measure_probabilities(run_circuit(grover, 3, tc.oracle), tc.measured_qubits)
        assert abs(probs[tc.target_index] - 0.78125) <= 1e-9
    assert search3.classical_oracle_calls == 4
    report = direct_qa_fitness(grover, search3)
    assert abs(report.fitness - (0.25 + count_gates(grover) / 100000)) <= 1e-12
    assert time.perf_counter() - t0 < 1.0


@criterion(2, "algorithm fidelity (indirect penalties, baseline == direct when failing)")
def test_c2_algorithm_fidelity():
    t0 = time.perf_counter()
    search3, bv3 = make_search_suite(3), make_bv_suite(3)
    per = len(search3) + 1
    h, cx, x, z = GateSpec(GateKind.H, 0), GateSpec(GateKind.CX, 1, 0), GateSpec(GateKind.X, 2), GateSpec(GateKind.Z, 1)
    constructed = {
        (True, True): [h, cx, x],
        (True, False): [h, x, z],
        (False, True): [cx, x, z],
        (False, False): [x, z],
    }
    for (sup, ent), genes in constructed.items():
        c = Chromosome.padded(genes, 30)
        assert contains_superposition_gates(c) is sup and contains_entanglement_gates(c) is ent
        missing = (not sup) + (not ent)
        base = baseline_fitness(c, search3)
        ind = indirect_qa_fitness(c, search3)
        assert ind.penalty == missing * per
        assert ind.fitness == pytest.approx(base.fitness + missing * per, abs=1e-12)
    # same on BV, including an all-pass circuit
    solved = Chromosome.padded(list(textbook_bv(3)) + [GateSpec(GateKind.CZ, 1, 0)] * 2, 15)
    assert indirect_qa_fitness(solved, bv3).fitness == baseline_fitness(solved, bv3).fitness
    assert indirect_qa_fitness(textbook_bv(3, 15), bv3).fitness == pytest.approx(
        baseline_fitness(textbook_bv(3, 15), bv3).fitness + 9, abs=1e-12
    )

    rng = np.random.default_rng(2024)
    gate_set = ALL_KINDS | {GateKind.ORACLE}
    checked = 0
    for _ in range(1000):
        c = random_chromosome(rng, 3, 30, gate_set)
        base = baseline_fitness(c, search3)
        if base.hits_remaining > 0:
            assert direct_qa_fitness(c, search3) == base
            checked += 1
    assert checked > 900
    assert time.perf_counter() - t0 < 30.0


@criterion(3, "simulator properties (unitarity, norm, composition, JSD metric)")
def test_c3_simulator_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    for kind in sorted(ALL_KINDS):
        for _ in range(5):
            t = int(rng.integers(0, 3))
            ctrl = (t + int(rng.integers(1, 3))) % 3 if kind in CONTROLLED else None
            angle = float(rng.uniform(-math.pi, math.pi)) if kind in PARAMETERIZED else None
            u = gate_unitary(GateSpec(kind, t, ctrl, angle), 3)
            assert np.max(np.abs(u @ u.conj().T - np.eye(8))) < 1e-9

    for i in range(1000):
        n = int(rng.integers(2, 5))
        length = int(rng.integers(1, 31))
        c = random_chromosome(rng, n, length)
        state = run_circuit(c, n)
        assert abs(np.linalg.norm(state) - 1) < 1e-9
        u = extract_unitary(c, n, 0)
        assert np.max(np.abs(state - u[:, 0])) < 1e-9
        if i % 50 == 0:
            assert np.max(np.abs(u - dense.circuit_matrix(c, n))) < 1e-9

    d = jensen_shannon_distance
    for _ in range(1000):
        k = int(rng.integers(2, 17))
        p, q, r = rng.dirichlet(np.ones(k), size=3)
        assert 0 <= d(p, q) <= 1
        assert d(p, p) < 1e-9
        assert abs(d(p, q) - d(q, p)) < 1e-9
        assert d(p, r) <= d(p, q) + d(q, r) + 1e-9
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.slow
@criterion(4, "elitism monotonicity (12 runs, pop 200, 200 generations, BV n=3)")
def test_c4_elitism_monotonicity():
    suite = make_bv_suite(3)
    for mode in ("baseline", "direct", "indirect"):
        for seed in range(12):
            cfg = GAConfig(population_size=200, generations=200, chromosome_length=15, seed=seed)
            mins = [s.min_fitness for s in run_experiment(cfg, suite, mode)]
            assert len(mins) == 200
            assert all(b <= a for a, b in zip(mins, mins[1:])), (mode, seed)


@pytest.mark.slow
@criterion(5, "convergence capability (>= 6 of 12 indirect BV runs solve, pop 200, 300 generations)")
def test_c5_convergence_capability():
    suite = make_bv_suite(3)
    finals = []
    for seed in range(12):
        cfg = GAConfig(population_size=200, generations=300, chromosome_length=15, seed=seed)
        finals.append(run_experiment(cfg, suite, "indirect")[-1])
    solved = [s for s in finals if s.min_fitness < 1]
    print(f"criterion 5: {len(solved)}/12 runs solved; finals {[round(s.min_fitness, 5) for s in finals]}")
    best = min(finals, key=lambda s: s.min_fitness)
    assert evaluate_hits(best.best_chromosome, suite)[0] == 0
    assert contains_superposition_gates(best.best_chromosome)
    assert contains_entanglement_gates(best.best_chromosome)
    assert len(solved) >= 6


@pytest.mark.slow
@pytest.mark.full_scale
@pytest.mark.skipif(os.environ.get("QAEVO_FULL_SCALE") != "1", reason="set QAEVO_FULL_SCALE=1")
@criterion(6, "full-scale ordering (BV gen 500: indirect avg min <= baseline avg min)")
def test_c6_full_scale():
    suite = make_bv_suite(3)
    averages = {}
    for mode in ("baseline", "indirect"):
        finals = []
        for seed in range(12):
            cfg = GAConfig(generations=500, chromosome_length=15, seed=seed)
            finals.append(run_experiment(cfg, suite, mode)[-1].min_fitness)
        averages[mode] = float(np.mean(finals))
    print(f"criterion 6: averaged min fitness at generation 500: {averages}")
    assert averages["indirect"] <= averages["baseline"]


@criterion(7, "diffusion-operator check (post-oracle suffix vs signed diffusion matrix)")
def test_c7_diffusion_operator():
    t0 = time.perf_counter()
    circuit = textbook_grover(30)
    assert sum(g.kind == GateKind.ORACLE for g in circuit) == 1
    start = oracle_suffix_start(circuit)
    u = extract_unitary(circuit, 3, start)
    assert np.max(np.abs(np.abs(u) - np.abs(SIGNED_DIFFUSION_REFERENCE))) < 1e-9
    signs = row_signs(u, SIGNED_DIFFUSION_REFERENCE, tol=1e-9)
    assert signs is not None
    print(f"criterion 7: row signs relative to the printed matrix: {signs.tolist()}")
    assert time.perf_counter() - t0 < 1.0
