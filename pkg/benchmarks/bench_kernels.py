"""Population-evaluation throughput: numba kernel vs pure-numpy kernel.

    python benchmarks/bench_kernels.py [--population 1000] [--repeat 5]

Each backend scores a random population against the BV (4 qubits, length 15)
and search (3 qubits, length 30) suites; both outputs are compared before
timings are reported.
"""
import argparse
import time

import numpy as np

from qaevo import _accel
from qaevo.evolve import GAConfig, init_population
from qaevo.fitness import population_probabilities
from qaevo.problems import make_bv_suite, make_search_suite


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--population", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["numba", "numpy"] if _accel.HAS_NUMBA else ["numpy"]
    print(f"{'suite':<8} {'backend':<7} {'seconds':>9} {'circuits/s':>11}")
    for name, suite, length in (("bv", make_bv_suite(3), 15), ("search", make_search_suite(3), 30)):
        cfg = GAConfig(population_size=args.population, chromosome_length=length)
        pop = init_population(cfg, suite.num_qubits, rng=np.random.default_rng(0))
        results = {}
        for backend in backends:
            run = lambda: population_probabilities(*pop.arrays, suite, backend=backend)
            run()  # compile / warm caches
            seconds, results[backend] = best_time(run, args.repeat)
            rate = args.population / seconds
            print(f"{name:<8} {backend:<7} {seconds:>9.4f} {rate:>11.0f}")
        if len(results) == 2:
            diff = np.max(np.abs(results["numba"] - results["numpy"]))
            print(f"{name:<8} max |numba - numpy| = {diff:.2e}")


if __name__ == "__main__":
    main()
