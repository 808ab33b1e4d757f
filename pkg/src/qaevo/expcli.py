"""Experiment runner and command-line interface.

``qaevo run`` executes independent GA runs for one problem and one or all
fitness functions and writes, per fitness function::

    run_00.csv ...     generation,min_fitness,mean_fitness
    aggregate.csv      generation,avg_min_fitness,avg_mean_fitness
    best.qasm          overall best circuit (OpenQASM 2.0)
    best.txt           same circuit, one gene per line
    best_report.json   its fitness breakdown
    manifest.json      the fully resolved manifest

``qaevo compare CIRCUIT`` checks a solving circuit against the problem
suite; ``qaevo suite`` dumps a suite description as JSON.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .evolve import GAConfig, GenerationStats, run_experiment
from .fitness import FITNESS_MODES, fitness_report, population_probabilities
from .gates import Chromosome, count_gates, count_oracle_gates, from_qasm, from_text, to_qasm, to_text
from .problems import ProblemSuite, make_suite
from .reference import SIGNED_DIFFUSION_REFERENCE, oracle_suffix_start, row_signs
from .sim import extract_unitary

log = logging.getLogger("qaevo")

PROBLEM_DEFAULTS = {
    "bv": {"chromosome_length": 15, "generations": 500},
    "search": {"chromosome_length": 30, "generations": 800},
}


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentManifest:
    problem: str = "bv"
    num_input_bits: int = 3
    fitness: str = "indirect"
    runs: int = 12
    ga: GAConfig = field(default_factory=GAConfig)
    output_dir: str = "results"

    def validate(self) -> None:
        if self.problem not in PROBLEM_DEFAULTS:
            raise ManifestError(f"problem must be one of {sorted(PROBLEM_DEFAULTS)}")
        if self.fitness not in FITNESS_MODES + ("all",):
            raise ManifestError(f"fitness must be one of {FITNESS_MODES + ('all',)}")
        if self.runs < 1:
            raise ManifestError("runs must be at least 1")
        min_bits = 1 if self.problem == "bv" else 2
        if self.num_input_bits < min_bits:
            raise ManifestError(f"num_input_bits must be at least {min_bits} for {self.problem}")

    @property
    def fitness_modes(self) -> tuple[str, ...]:
        return FITNESS_MODES if self.fitness == "all" else (self.fitness,)

    def run_seed(self, run: int) -> int:
        return self.ga.seed + run

    def suite(self) -> ProblemSuite:
        return make_suite(self.problem, self.num_input_bits)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "num_input_bits": self.num_input_bits,
            "fitness": self.fitness,
            "runs": self.runs,
            "output_dir": str(self.output_dir),
            "ga": self.ga.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentManifest":
        data = dict(data)
        problem = data.get("problem", "bv")
        ga_fields = dict(PROBLEM_DEFAULTS.get(problem, {}))
        ga_fields.update(data.pop("ga", {}) or {})
        unknown = set(data) - {"problem", "num_input_bits", "fitness", "runs", "output_dir"}
        if unknown:
            raise ManifestError(f"unknown manifest fields: {sorted(unknown)}")
        try:
            ga = GAConfig.from_dict(ga_fields)
        except (TypeError, ValueError, KeyError) as exc:
            raise ManifestError(f"invalid GA settings: {exc}") from None
        return cls(ga=ga, **data)


@dataclass
class RunResult:
    run: int
    seed: int
    history: list[GenerationStats]

    @property
    def best(self) -> GenerationStats:
        return min(self.history, key=lambda s: s.min_fitness)


@dataclass
class ExperimentResult:
    fitness: str
    runs: list[RunResult]
    aggregate: list[tuple[int, float, float]]
    best_chromosome: Chromosome | None
    best_report: dict | None
    output_dir: Path


@dataclass
class ComparisonReport:
    oracle_calls: int
    classical_oracle_calls: float
    oracle_ratio: float
    gate_count: int
    target_probabilities: list[float]
    case_labels: list[str]
    suffix_unitary: np.ndarray | None = None
    reference_row_signs: np.ndarray | None = None

    def format(self) -> str:
        lines = [
            f"oracle calls: {self.oracle_calls} (classical baseline {self.classical_oracle_calls:g},"
            f" ratio {self.oracle_ratio:.6g})",
            f"gates: {self.gate_count}",
            "target probabilities:",
        ]
        lines += [f"  {lab}: {p:.12f}" for lab, p in zip(self.case_labels, self.target_probabilities)]
        if self.suffix_unitary is not None:
            lines.append("post-oracle unitary (real part):")
            lines += ["  " + " ".join(f"{x:+.4f}" for x in row) for row in self.suffix_unitary.real]
            lines.append("post-oracle unitary (imaginary part):")
            lines += ["  " + " ".join(f"{x:+.4f}" for x in row) for row in self.suffix_unitary.imag]
            if self.reference_row_signs is not None:
                signs = " ".join(f"{s:+d}" for s in self.reference_row_signs)
                lines.append(f"matches signed diffusion reference up to row signs: {signs}")
            elif self.suffix_unitary.shape == SIGNED_DIFFUSION_REFERENCE.shape:
                lines.append("does not match the signed diffusion reference up to row signs")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        d = {
            "oracle_calls": self.oracle_calls,
            "classical_oracle_calls": self.classical_oracle_calls,
            "oracle_ratio": self.oracle_ratio,
            "gate_count": self.gate_count,
            "target_probabilities": dict(zip(self.case_labels, self.target_probabilities)),
        }
        if self.suffix_unitary is not None:
            d["suffix_unitary_real"] = self.suffix_unitary.real.tolist()
            d["suffix_unitary_imag"] = self.suffix_unitary.imag.tolist()
        if self.reference_row_signs is not None:
            d["reference_row_signs"] = self.reference_row_signs.tolist()
        return d


def compare_to_reference(best, suite: ProblemSuite) -> ComparisonReport:
    """Oracle usage and per-case target probabilities of a solving circuit."""
    best = Chromosome(best)
    best.check(suite.num_qubits)
    probs = population_probabilities(*best.to_arrays(), suite)[0]
    target = probs[np.arange(len(suite)), suite.target_indices]
    report = fitness_report(best, suite, "baseline")
    if report.hits_remaining:
        raise ValueError(f"circuit fails {report.hits_remaining} of {len(suite)} test cases")
    n_oracle = count_oracle_gates(best)
    out = ComparisonReport(
        oracle_calls=n_oracle,
        classical_oracle_calls=suite.classical_oracle_calls,
        oracle_ratio=n_oracle / suite.classical_oracle_calls,
        gate_count=count_gates(best),
        target_probabilities=[float(p) for p in target],
        case_labels=[tc.oracle.label(suite.input_bits) for tc in suite.test_cases],
    )
    if suite.problem == "search":
        start = oracle_suffix_start(best)
        out.suffix_unitary = extract_unitary(best, suite.num_qubits, start)
        if out.suffix_unitary.shape == SIGNED_DIFFUSION_REFERENCE.shape:
            out.reference_row_signs = row_signs(out.suffix_unitary, SIGNED_DIFFUSION_REFERENCE)
    return out


# ---------------------------------------------------------------- running

def _check_writable(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=path):
            pass
    except OSError as exc:
        raise ManifestError(f"output directory {path} is not writable: {exc}") from None


def _one_run(args) -> RunResult:
    manifest, mode, run = args
    seed = manifest.run_seed(run)
    config = replace(manifest.ga, seed=seed)
    history = run_experiment(config, manifest.suite(), mode, np.random.default_rng(seed))
    log.info("%s run %d (seed %d): final min %.6g", mode, run, seed, history[-1].min_fitness if history else float("nan"))
    return RunResult(run, seed, history)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_run_csv(path: Path, history: list[GenerationStats]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "min_fitness", "mean_fitness"])
        for s in history:
            w.writerow([s.generation, _fmt(s.min_fitness), _fmt(s.mean_fitness)])


def aggregate_runs(runs: list[RunResult]) -> list[tuple[int, float, float]]:
    if not runs or not runs[0].history:
        return []
    mins = np.array([[s.min_fitness for s in r.history] for r in runs])
    means = np.array([[s.mean_fitness for s in r.history] for r in runs])
    return [
        (g, float(a), float(b))
        for g, a, b in zip(range(mins.shape[1]), mins.mean(axis=0), means.mean(axis=0))
    ]


def write_aggregate_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "avg_min_fitness", "avg_mean_fitness"])
        for g, a, b in rows:
            w.writerow([g, _fmt(a), _fmt(b)])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [
            {k: (int(v) if k == "generation" else float(v)) for k, v in row.items()}
            for row in csv.DictReader(fh)
        ]


def _run_mode(manifest: ExperimentManifest, mode: str, out: Path, workers: int) -> ExperimentResult:
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(manifest, mode, r) for r in range(manifest.runs)]
    if workers > 1 and manifest.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_one_run, jobs))
    else:
        runs = [_one_run(j) for j in jobs]
    width = max(2, len(str(manifest.runs - 1)))
    for r in runs:
        write_run_csv(out / f"run_{r.run:0{width}d}.csv", r.history)
    rows = aggregate_runs(runs)
    write_aggregate_csv(out / "aggregate.csv", rows)

    best = best_report = None
    finished = [r for r in runs if r.history]
    if finished:
        winner = min(finished, key=lambda r: (r.best.min_fitness, r.run))
        best = winner.best.best_chromosome
        suite = manifest.suite()
        best_report = fitness_report(best, suite, mode).to_dict()
        best_report.update(run=winner.run, seed=winner.seed)
        (out / "best.qasm").write_text(to_qasm(best, suite.num_qubits))
        (out / "best.txt").write_text(to_text(best))
        (out / "best_report.json").write_text(json.dumps(best_report, indent=2) + "\n")
    single = replace(manifest, fitness=mode, output_dir=str(out))
    (out / "manifest.json").write_text(json.dumps(single.to_dict(), indent=2) + "\n")
    return ExperimentResult(mode, runs, rows, best, best_report, out)


def run_manifest(manifest: ExperimentManifest, workers: int = 1) -> dict[str, ExperimentResult]:
    """Run every configured fitness function; returns results keyed by mode.

    With a single fitness function files go straight into ``output_dir``;
    with ``fitness="all"`` each mode gets its own subdirectory.
    """
    manifest.validate()
    root = Path(manifest.output_dir)
    _check_writable(root)
    (root / "suite.json").write_text(json.dumps(manifest.suite().to_dict(), indent=2) + "\n")
    results = {}
    for mode in manifest.fitness_modes:
        out = root / mode if manifest.fitness == "all" else root
        results[mode] = _run_mode(manifest, mode, out, workers)
    return results


def plot_aggregates(results: dict[str, list[tuple[int, float, float]]], path) -> None:
    """SVG with averaged mean and minimum fitness curves (needs matplotlib)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_mean, ax_min) = plt.subplots(1, 2, figsize=(10, 4))
    for mode, rows in results.items():
        gens = [r[0] for r in rows]
        ax_mean.plot(gens, [r[2] for r in rows], label=mode)
        ax_min.plot(gens, [r[1] for r in rows], label=mode)
    ax_mean.set_title("average mean fitness")
    ax_min.set_title("average minimum fitness")
    for ax in (ax_mean, ax_min):
        ax.set_xlabel("generation")
        ax.set_ylabel("fitness")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ---------------------------------------------------------------- CLI

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaevo", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run GA experiments")
    run.add_argument("manifest", nargs="?", help="JSON manifest; flags override its fields")
    run.add_argument("--problem", choices=sorted(PROBLEM_DEFAULTS))
    run.add_argument("--input-bits", type=int, dest="num_input_bits",
                     help="BV input bits / search qubits (default 3)")
    run.add_argument("--fitness", choices=FITNESS_MODES + ("all",))
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--generations", type=int)
    run.add_argument("--population", type=int, dest="population_size")
    run.add_argument("--length", type=int, dest="chromosome_length")
    run.add_argument("--param-opt", type=int, dest="param_opt_top_k", metavar="TOP_K",
                     help="refine angles of the TOP_K elites each generation")
    run.add_argument("--out", dest="output_dir")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--plot", action="store_true", help="also write fitness.svg")

    cmp_ = sub.add_parser("compare", help="compare a solving circuit with the problem suite")
    cmp_.add_argument("circuit", help=".qasm or one-gene-per-line .txt file")
    cmp_.add_argument("--problem", choices=sorted(PROBLEM_DEFAULTS), required=True)
    cmp_.add_argument("--input-bits", type=int, default=3, dest="num_input_bits")
    cmp_.add_argument("--json", action="store_true")

    suite = sub.add_parser("suite", help="print a problem suite as JSON")
    suite.add_argument("--problem", choices=sorted(PROBLEM_DEFAULTS), required=True)
    suite.add_argument("--input-bits", type=int, default=3, dest="num_input_bits")
    return parser


def manifest_from_args(args) -> ExperimentManifest:
    data: dict = {}
    if args.manifest:
        try:
            data = json.loads(Path(args.manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifestError(f"cannot read manifest {args.manifest}: {exc}") from None
    for key in ("problem", "num_input_bits", "fitness", "runs", "output_dir"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    ga = dict(data.get("ga", {}))
    for key in ("seed", "generations", "population_size", "chromosome_length", "param_opt_top_k"):
        value = getattr(args, key)
        if value is not None:
            ga[key] = value
    data["ga"] = ga
    manifest = ExperimentManifest.from_dict(data)
    manifest.validate()
    return manifest


def _load_circuit(path: str, num_qubits: int) -> Chromosome:
    text = Path(path).read_text()
    if path.endswith(".qasm"):
        chromosome, n = from_qasm(text)
        if n != num_qubits:
            raise ManifestError(f"circuit has {n} qubits, problem needs {num_qubits}")
        return chromosome
    chromosome = from_text(text)
    chromosome.check(num_qubits)
    return chromosome


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    try:
        if args.command == "run":
            manifest = manifest_from_args(args)
            results = run_manifest(manifest, workers=args.workers)
            for mode, res in results.items():
                final = res.aggregate[-1] if res.aggregate else None
                best = res.best_report["fitness"] if res.best_report else float("nan")
                print(f"{mode}: {len(res.runs)} runs -> {res.output_dir}"
                      + (f"; final avg min {final[1]:.6g}" if final else "")
                      + f"; best {best:.6g}")
            if args.plot:
                path = Path(manifest.output_dir) / "fitness.svg"
                plot_aggregates({m: r.aggregate for m, r in results.items()}, path)
                print(f"plot: {path}")
        elif args.command == "compare":
            suite = make_suite(args.problem, args.num_input_bits)
            report = compare_to_reference(_load_circuit(args.circuit, suite.num_qubits), suite)
            print(json.dumps(report.to_dict(), indent=2) if args.json else report.format())
        elif args.command == "suite":
            print(json.dumps(make_suite(args.problem, args.num_input_bits).to_dict(), indent=2))
    except (ManifestError, ValueError, OSError) as exc:
        print(f"qaevo: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
