"""Genetic algorithm over fixed-length gate chromosomes.

Each generation: score the population, copy the best ``elitism_fraction``
unaltered, fill the rest by tournament selection, single-point crossover
and per-gene mutation, then optionally polish the elites' rotation angles
with a Nelder-Mead search.  All randomness comes from one
``numpy.random.Generator`` consumed in a fixed order, so a seed fully
determines a run.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .fitness import FITNESS_FUNCTIONS, FITNESS_MODES, score_arrays
from .gates import DEFAULT_GATE_SET, PARAMETERIZED, Chromosome, GateKind, random_gene_arrays
from .problems import ProblemSuite

log = logging.getLogger(__name__)

_PARAM_CODES = np.array(sorted(int(k) for k in PARAMETERIZED))


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 1000
    crossover_prob: float = 0.4
    gate_swap_prob: float = 0.03
    elitism_fraction: float = 0.10
    chromosome_length: int = 15
    generations: int = 500
    tournament_size: int = 2
    seed: int = 0
    gate_set: frozenset = DEFAULT_GATE_SET
    mutation: str = "replace"  # or "swap": exchange two gene positions
    param_opt_top_k: int = 0  # 0 disables angle refinement
    param_opt_max_iters: int = 50

    def __post_init__(self):
        object.__setattr__(self, "gate_set", frozenset(GateKind(k) for k in self.gate_set))
        self.validate()

    @property
    def elite_count(self) -> int:
        return math.floor(self.elitism_fraction * self.population_size + 1e-9)

    def validate(self) -> None:
        for name in ("crossover_prob", "gate_swap_prob", "elitism_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.chromosome_length < 1:
            raise ValueError("chromosome_length must be positive")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be positive")
        if self.elite_count < 1:
            raise ValueError("elitism must keep at least one individual")
        if self.mutation not in ("replace", "swap"):
            raise ValueError(f"unknown mutation {self.mutation!r}")
        if self.param_opt_top_k < 0 or self.param_opt_max_iters < 1:
            raise ValueError("invalid parameter-optimization settings")
        if not self.gate_set:
            raise ValueError("gate set is empty")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["gate_set"] = sorted(k.name for k in self.gate_set)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "GAConfig":
        data = dict(data)
        if "gate_set" in data:
            data["gate_set"] = frozenset(GateKind[name.upper()] for name in data["gate_set"])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown GA settings: {sorted(unknown)}")
        return cls(**data)


@dataclass
class Population:
    kinds: np.ndarray
    targets: np.ndarray
    controls: np.ndarray
    angles: np.ndarray

    def __len__(self):
        return self.kinds.shape[0]

    @property
    def arrays(self):
        return self.kinds, self.targets, self.controls, self.angles

    def chromosome(self, i: int) -> Chromosome:
        return Chromosome.from_arrays(*(a[i] for a in self.arrays))

    def take(self, indices) -> "Population":
        return Population(*(a[indices] for a in self.arrays))

    def copy(self) -> "Population":
        return Population(*(a.copy() for a in self.arrays))

    @classmethod
    def concat(cls, parts: Sequence["Population"]) -> "Population":
        return cls(*(np.concatenate(col) for col in zip(*(p.arrays for p in parts))))

    @classmethod
    def from_chromosomes(cls, chromosomes: Sequence[Chromosome]) -> "Population":
        cols = zip(*(Chromosome(c).to_arrays() for c in chromosomes))
        return cls(*(np.stack(col) for col in cols))

    def __eq__(self, other):
        return isinstance(other, Population) and all(
            np.array_equal(a, b) for a, b in zip(self.arrays, other.arrays)
        )


@dataclass
class GenerationStats:
    generation: int
    min_fitness: float
    mean_fitness: float
    best_chromosome: Chromosome = field(repr=False)


def _mode(fitness_fn) -> str:
    if isinstance(fitness_fn, str):
        mode = fitness_fn
    else:
        names = {fn: name for name, fn in FITNESS_FUNCTIONS.items()}
        mode = names.get(fitness_fn)
    if mode not in FITNESS_MODES:
        raise ValueError(f"unknown fitness function {fitness_fn!r}")
    return mode


def population_fitness(pop: Population, suite: ProblemSuite, fitness_fn) -> np.ndarray:
    return score_arrays(*pop.arrays, suite, _mode(fitness_fn))["fitness"]


def init_population(
    config: GAConfig, num_qubits: int, gate_set=None, rng: np.random.Generator | None = None
) -> Population:
    if rng is None:
        rng = np.random.default_rng(config.seed)
    gate_set = config.gate_set if gate_set is None else gate_set
    shape = (config.population_size, config.chromosome_length)
    return Population(*random_gene_arrays(shape, num_qubits, gate_set, rng))


def _ranks(fitness: np.ndarray) -> np.ndarray:
    # unique ranks; equal fitness ranks the lower index first
    order = np.argsort(fitness, kind="stable")
    ranks = np.empty_like(order)
    ranks[order] = np.arange(order.size)
    return ranks


def tournament_select(fitness: np.ndarray, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    draws = rng.integers(0, fitness.size, size=(n, size))
    ranks = _ranks(fitness)[draws]
    return draws[np.arange(n), np.argmin(ranks, axis=1)]


def crossover(parents_a: Population, parents_b: Population, prob: float, rng) -> Population:
    """Single-point crossover of aligned parent pairs; two children per pair."""
    n, length = parents_a.kinds.shape
    do_cross = rng.random(n) < prob
    if length > 1:
        cuts = rng.integers(1, length, size=n)
    else:
        cuts = np.ones(n, dtype=np.int64)
    head = np.arange(length)[None, :] < cuts[:, None]
    head |= ~do_cross[:, None]
    first, second = [], []
    for a, b in zip(parents_a.arrays, parents_b.arrays):
        first.append(np.where(head, a, b))
        second.append(np.where(head, b, a))
    # interleave so children of a pair stay adjacent
    cols = [np.stack([x, y], axis=1).reshape((2 * n, length)) for x, y in zip(first, second)]
    return Population(*cols)


def mutate(pop: Population, prob: float, num_qubits: int, config: GAConfig, rng) -> Population:
    hit = rng.random(pop.kinds.shape) < prob
    if not hit.any():
        return pop
    pop = pop.copy()
    rows, cols = np.nonzero(hit)
    if config.mutation == "replace":
        fresh = random_gene_arrays((rows.size,), num_qubits, config.gate_set, rng)
        for arr, new in zip(pop.arrays, fresh):
            arr[rows, cols] = new
    else:
        length = pop.kinds.shape[1]
        others = (cols + rng.integers(1, max(length, 2), size=rows.size)) % length
        for r, c, o in zip(rows, cols, others):
            for arr in pop.arrays:
                arr[r, c], arr[r, o] = arr[r, o], arr[r, c]
    return pop


def _wrap(angles: np.ndarray) -> np.ndarray:
    return (angles + np.pi) % (2 * np.pi) - np.pi


def refine_angles(
    pop: Population, index: int, suite: ProblemSuite, mode: str, max_iters: int, current: float
) -> float:
    """Nelder-Mead over the rotation angles of individual ``index``.

    The refined angles are written back only if they strictly improve
    fitness.  Returns the individual's (possibly new) fitness.
    """
    slots = np.nonzero(np.isin(pop.kinds[index], _PARAM_CODES))[0]
    if slots.size == 0:
        return current
    kinds, targets, controls = (a[index][None] for a in pop.arrays[:3])
    base = pop.angles[index].copy()

    def objective(x):
        angles = base.copy()
        angles[slots] = _wrap(x)
        return float(score_arrays(kinds, targets, controls, angles[None], suite, mode)["fitness"][0])

    res = minimize(
        objective, base[slots], method="Nelder-Mead",
        options={"maxiter": max_iters, "xatol": 1e-6, "fatol": 1e-12},
    )
    if res.fun < current:
        pop.angles[index, slots] = _wrap(res.x)
        return float(res.fun)
    return current


def step_generation(
    pop: Population,
    suite: ProblemSuite,
    fitness_fn,
    config: GAConfig,
    rng: np.random.Generator,
    generation: int = 0,
) -> tuple[Population, GenerationStats]:
    if len(pop) != config.population_size:
        raise ValueError(f"population has {len(pop)} individuals, expected {config.population_size}")
    mode = _mode(fitness_fn)
    fitness = population_fitness(pop, suite, mode)
    order = np.argsort(fitness, kind="stable")
    stats = GenerationStats(
        generation=generation,
        min_fitness=float(fitness[order[0]]),
        mean_fitness=float(fitness.mean()),
        best_chromosome=pop.chromosome(int(order[0])),
    )

    n_elite = config.elite_count
    elite_idx = np.sort(order[:n_elite])
    elites = pop.take(elite_idx)
    n_children = config.population_size - n_elite
    if n_children > 0:
        n_pairs = (n_children + 1) // 2
        parents = tournament_select(fitness, 2 * n_pairs, config.tournament_size, rng)
        children = crossover(
            pop.take(parents[0::2]), pop.take(parents[1::2]), config.crossover_prob, rng
        ).take(slice(0, n_children))
        children = mutate(children, config.gate_swap_prob, suite.num_qubits, config, rng)
        new_pop = Population.concat([elites, children])
    else:
        new_pop = elites

    if config.param_opt_top_k:
        elite_fitness = fitness[elite_idx]
        for local in np.argsort(elite_fitness, kind="stable")[: config.param_opt_top_k]:
            refine_angles(
                new_pop, int(local), suite, mode, config.param_opt_max_iters,
                float(elite_fitness[local]),
            )
    return new_pop, stats


def run_experiment(
    config: GAConfig,
    suite: ProblemSuite,
    fitness_fn,
    rng: np.random.Generator | None = None,
    callback: Callable[[GenerationStats], None] | None = None,
) -> list[GenerationStats]:
    """Run ``config.generations`` generations; one stats entry per generation."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    pop = init_population(config, suite.num_qubits, rng=rng)
    history = []
    for g in range(config.generations):
        pop, stats = step_generation(pop, suite, fitness_fn, config, rng, generation=g)
        history.append(stats)
        if callback is not None:
            callback(stats)
        if g % 50 == 0:
            log.debug("gen %d min %.6g mean %.6g", g, stats.min_fitness, stats.mean_fitness)
    return history


def with_overrides(config: GAConfig, **changes) -> GAConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})
