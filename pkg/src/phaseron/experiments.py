"""Seeded experiment runners producing CSV artifacts.

Every runner is a pure function of its :class:`ExperimentConfig`; files are
written with fixed float formatting (``repr``) and no timestamps, so
repeating a run reproduces the same bytes.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from phaseron.circuits import (
    Backend,
    PhaseVector,
    binary_specialize,
    build_neuron_circuit,
    format_circuit,
)
from phaseron.errors import ConfigError
from phaseron.oracle import activation
from phaseron.statevector import TWO_PI, qubit_probability, run_circuit, sample_measurements
from phaseron.training import (
    RNG_ALGORITHM,
    EvaluationMode,
    RunRecord,
    TrainingConfig,
    make_binary_dataset,
    make_sigmoid_dataset,
    padded_affinities,
    random_phase_vector,
    train,
    train_binary_perceptron,
)


class Experiment(enum.Enum):
    INNER_PRODUCT_CONTINUOUS = "inner-product-continuous"
    INNER_PRODUCT_BINARY = "inner-product-binary"
    BINARY_PERCEPTRON = "binary-perceptron"
    SIGMOID_TRAINING = "sigmoid"


_DEFAULT_MODE = {
    Experiment.INNER_PRODUCT_CONTINUOUS: EvaluationMode.SAMPLED,
    Experiment.INNER_PRODUCT_BINARY: EvaluationMode.SAMPLED,
    Experiment.BINARY_PERCEPTRON: EvaluationMode.STATEVECTOR,
    Experiment.SIGMOID_TRAINING: EvaluationMode.ANALYTIC,
}
_DEFAULT_MAX_STEPS = {
    Experiment.BINARY_PERCEPTRON: 50,
    Experiment.SIGMOID_TRAINING: 10_000,
}
_DEFAULT_VECTORS = {
    Experiment.INNER_PRODUCT_CONTINUOUS: 8,
    Experiment.INNER_PRODUCT_BINARY: 16,
}
_TRAINING = (Experiment.BINARY_PERCEPTRON, Experiment.SIGMOID_TRAINING)


@dataclass
class ExperimentConfig:
    """Settings for one experiment. ``None`` fields take per-experiment defaults."""

    experiment: Experiment
    n_qubits: int = 2
    shots: int = 8192
    backends: tuple[Backend, ...] | None = None
    mode: EvaluationMode | None = None
    seed: int = 0
    out: Path | None = None
    n_vectors: int | None = None
    repeats: int = 1
    n_samples: int = 200
    learning_rate: float = 0.1
    max_steps: int | None = None
    cost_threshold: float = 1e-3
    stop_on_cost_increase: bool = True
    restarts: int = 59
    n_positive: int = 5
    n_negative: int = 50
    start_at_objective: bool = False
    dump_circuit: bool = False

    def __post_init__(self):
        try:
            self.experiment = Experiment(self.experiment)
            if self.mode is None:
                self.mode = _DEFAULT_MODE[self.experiment]
            self.mode = EvaluationMode(self.mode)
            if self.backends is None:
                self.backends = (
                    (Backend.HSGS,) if self.experiment in _TRAINING
                    else (Backend.ROTATION, Backend.HSGS)
                )
            self.backends = tuple(Backend(b) for b in self.backends)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.max_steps is None:
            self.max_steps = _DEFAULT_MAX_STEPS.get(self.experiment, 1)
        if self.n_vectors is None:
            self.n_vectors = _DEFAULT_VECTORS.get(self.experiment, 1)
        if self.out is not None:
            self.out = Path(self.out)
        for name in ("n_qubits", "shots", "n_vectors", "repeats", "n_samples", "max_steps", "restarts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n_positive < 0 or self.n_negative < 0 or self.n_positive + self.n_negative < 1:
            raise ConfigError("binary dataset needs at least one sample")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if not self.backends:
            raise ConfigError("at least one backend is required")
        if self.experiment in _TRAINING and len(self.backends) != 1:
            raise ConfigError(f"{self.experiment.value} runs on a single backend")

    @property
    def m(self) -> int:
        return 1 << self.n_qubits

    def training_config(self) -> TrainingConfig:
        return TrainingConfig(
            learning_rate=self.learning_rate,
            max_steps=self.max_steps,
            cost_threshold=self.cost_threshold,
            stop_on_cost_increase=self.stop_on_cost_increase,
            mode=self.mode,
            shots=self.shots,
            backend=self.backends[0],
            seed=self.seed,
        )

    def describe(self) -> dict[str, str]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, enum.Enum):
                v = v.value
            elif isinstance(v, tuple):
                v = ",".join(b.value for b in v)
            elif f.name == "out":
                continue
            out[f.name] = str(v)
        return out


# -- file helpers -----------------------------------------------------------

def _library_version() -> str:
    from phaseron import __version__

    return __version__


def format_metadata(items: dict[str, object]) -> str:
    """Sidecar format: one ``key = value`` line per entry, in insertion order."""
    return "".join(f"{k} = {v}\n" for k, v in items.items())


def parse_metadata(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    return path


def _num(v: float) -> str:
    return repr(float(v))


# -- inner products ---------------------------------------------------------

def discrepancy(ideal, measured) -> float:
    """Mean absolute difference between measured and ideal outputs."""
    ideal = np.asarray(ideal, dtype=float).reshape(-1)
    measured = np.asarray(measured, dtype=float).reshape(-1)
    if ideal.size != measured.size:
        raise ValueError(f"length mismatch: {ideal.size} ideal vs {measured.size} measured")
    if ideal.size == 0:
        raise ValueError("discrepancy of an empty set is undefined")
    return float(np.mean(np.abs(measured - ideal)))


@dataclass
class PairResult:
    repeat: int
    backend: Backend
    input_index: int
    weight_index: int
    ideal: float
    measured: float

    @property
    def difference(self) -> float:
        return abs(self.measured - self.ideal)


@dataclass
class DiscrepancyReport:
    config: ExperimentConfig
    vectors: np.ndarray
    pairs: list[PairResult] = field(default_factory=list)

    @property
    def n(self) -> int:
        """Inner products per (repeat, backend)."""
        return len(self.vectors) ** 2

    def rows_for(self, backend: Backend, repeat: int = 0) -> list[PairResult]:
        backend = Backend(backend)
        return [p for p in self.pairs if p.backend is backend and p.repeat == repeat]

    def D(self, backend: Backend, repeat: int = 0) -> float:
        rows = self.rows_for(backend, repeat)
        return discrepancy([p.ideal for p in rows], [p.measured for p in rows])

    def table(self) -> list[tuple[int, dict[Backend, float]]]:
        """One row per repeat with a D value per backend."""
        return [
            (r, {b: self.D(b, r) for b in self.config.backends})
            for r in range(self.config.repeats)
        ]

    def pairs_csv(self) -> str:
        rows = [
            (p.repeat, p.backend.value, p.input_index, p.weight_index,
             _num(p.ideal), _num(p.measured), _num(p.difference))
            for p in self.pairs
        ]
        return _csv_text(
            ["repeat", "backend", "input", "weight", "ideal", "measured", "abs_difference"], rows
        )

    def summary_csv(self) -> str:
        backends = self.config.backends
        rows = [[r] + [_num(d[b]) for b in backends] for r, d in self.table()]
        return _csv_text(["repeat"] + [f"D_{b.value}" for b in backends], rows)


def vector_pool(config: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    m = config.m
    if config.experiment is Experiment.INNER_PRODUCT_BINARY:
        if m > 16:
            raise ConfigError("binary pools are limited to at most 4 qubits")
        patterns = np.array(list(itertools.product((1, -1), repeat=m)))
        if config.n_vectors < len(patterns):
            patterns = patterns[np.sort(rng.choice(len(patterns), config.n_vectors, replace=False))]
        return np.array([binary_specialize(p).phases for p in patterns])
    return rng.uniform(0.0, TWO_PI, size=(config.n_vectors, m))


def _measure(state, qubit: int, mode: EvaluationMode, shots: int, rng) -> float:
    if mode is EvaluationMode.SAMPLED:
        _, ones = sample_measurements(state, qubit, shots, rng)
        return ones / shots
    return qubit_probability(state, qubit)


def run_inner_product_experiment(config: ExperimentConfig) -> DiscrepancyReport:
    """Evaluate every ordered pair of a seeded vector pool on each backend.

    ``ideal`` is the closed-form output; ``measured`` is the circuit output
    (exact in statevector mode, shot frequencies in sampled mode).
    """
    if config.experiment not in (Experiment.INNER_PRODUCT_CONTINUOUS, Experiment.INNER_PRODUCT_BINARY):
        raise ConfigError(f"{config.experiment.value} is not an inner-product experiment")
    rng = np.random.default_rng(config.seed)
    vectors = vector_pool(config, rng)
    report = DiscrepancyReport(config=config, vectors=vectors)
    ideal = {
        (i, j): activation(vectors[i], vectors[j]).output
        for i in range(len(vectors))
        for j in range(len(vectors))
    }
    states = {}
    for b in config.backends:
        for (i, j) in ideal:
            if config.mode is not EvaluationMode.ANALYTIC:
                states[b, i, j] = run_circuit(build_neuron_circuit(vectors[i], vectors[j], b))
    anc = config.n_qubits
    for r in range(config.repeats):
        for b in config.backends:
            for (i, j), ideal_value in ideal.items():
                if config.mode is EvaluationMode.ANALYTIC:
                    measured = ideal_value
                else:
                    measured = _measure(states[b, i, j], anc, config.mode, config.shots, rng)
                report.pairs.append(PairResult(r, b, i, j, ideal_value, measured))

    if config.out is not None:
        out = config.out
        _write(out / "pairs.csv", report.pairs_csv())
        _write(out / "discrepancy.csv", report.summary_csv())
        _write(out / "vectors.csv", _csv_text(
            ["vector"] + [f"x_{j}" for j in range(config.m)],
            [[k] + [_num(v) for v in row] for k, row in enumerate(vectors)],
        ))
        _write(out / "run.meta", format_metadata(_metadata(config)))
        emit_plot_data(report, out / "plot.csv", config)
        if config.dump_circuit:
            _dump_circuits(config, vectors[0], vectors[min(1, len(vectors) - 1)])
    return report


# -- training experiments ---------------------------------------------------

@dataclass
class PerceptronResult:
    config: ExperimentConfig
    objective: np.ndarray
    records: list[RunRecord]

    def affinity_matrix(self) -> np.ndarray:
        return padded_affinities(self.records, self.config.max_steps + 1)

    def mean_affinity(self) -> np.ndarray:
        return self.affinity_matrix().mean(axis=0)


def run_binary_perceptron_experiment(config: ExperimentConfig) -> PerceptronResult:
    """Random +/-1 objective, 5-positive/50-negative dataset and repeated restarts."""
    rng = np.random.default_rng(config.seed)
    m = config.m
    objective = rng.choice((-1, 1), size=m)
    data = make_binary_dataset(objective, rng, config.n_positive, config.n_negative)
    tcfg = config.training_config()
    records = []
    for _ in range(config.restarts):
        w0 = objective.copy() if config.start_at_objective else rng.choice((-1, 1), size=m)
        records.append(train_binary_perceptron(tcfg, data, objective, w0, rng))
    result = PerceptronResult(config, objective, records)

    if config.out is not None:
        out = config.out
        aff = result.affinity_matrix()
        steps = range(aff.shape[1])
        _write(out / "affinity_steps.csv", _csv_text(
            ["restart", "step", "affinity"],
            [(r, s, _num(aff[r, s])) for r in range(aff.shape[0]) for s in steps],
        ))
        _write(out / "affinity_mean.csv", _csv_text(
            ["step", "mean_affinity"], [(s, _num(v)) for s, v in zip(steps, aff.mean(axis=0))]
        ))
        _write(out / "shuffles.csv", _csv_text(
            ["restart", "terminal_reason", "permutation"],
            [(r, rec.terminal_reason.value, " ".join(map(str, rec.shuffle)))
             for r, rec in enumerate(records)],
        ))
        _write(out / "dataset.csv", _csv_text(
            ["sample", "target"] + [f"x_{j}" for j in range(m)],
            [[k, _num(t)] + [_num(v) for v in x] for k, (x, t) in enumerate(zip(data.inputs, data.targets))],
        ))
        meta = _metadata(config)
        meta["objective"] = " ".join(str(int(b)) for b in objective)
        _write(out / "run.meta", format_metadata(meta))
        if config.dump_circuit:
            _dump_circuits(config, data.inputs[0], records[0].steps[0].weights)
    return result


@dataclass
class SigmoidResult:
    config: ExperimentConfig
    objective: PhaseVector
    record: RunRecord


def run_sigmoid_experiment(config: ExperimentConfig) -> SigmoidResult:
    """Continuous neuron trained by gradient descent on a seeded synthetic dataset."""
    rng = np.random.default_rng(config.seed)
    objective, data = make_sigmoid_dataset(rng, config.m, config.n_samples)
    w0 = random_phase_vector(rng, config.m, pin_first=True)
    record = train(config.training_config(), data, w0, objective=objective)
    result = SigmoidResult(config, objective, record)

    if config.out is not None:
        out = config.out
        _write(out / "run.csv", record.to_csv())
        _write(out / "dataset.csv", _csv_text(
            ["sample", "target"] + [f"x_{j}" for j in range(config.m)],
            [[k, _num(t)] + [_num(v) for v in x] for k, (x, t) in enumerate(zip(data.inputs, data.targets))],
        ))
        meta = _metadata(config)
        meta["objective"] = " ".join(_num(v) for v in objective.phases)
        meta["terminal_reason"] = record.terminal_reason.value
        _write(out / "run.meta", format_metadata(meta))
        emit_plot_data(record, out / "plot.csv", config)
        if config.dump_circuit:
            _dump_circuits(config, data.inputs[0], w0.phases)
    return result


def run_experiment(config: ExperimentConfig):
    if config.experiment in (Experiment.INNER_PRODUCT_CONTINUOUS, Experiment.INNER_PRODUCT_BINARY):
        return run_inner_product_experiment(config)
    if config.experiment is Experiment.BINARY_PERCEPTRON:
        return run_binary_perceptron_experiment(config)
    return run_sigmoid_experiment(config)


# -- plot data --------------------------------------------------------------

def _metadata(config: ExperimentConfig | None) -> dict[str, object]:
    meta: dict[str, object] = {"library_version": _library_version(), "rng": RNG_ALGORITHM}
    if config is not None:
        meta.update(config.describe())
    return meta


def emit_plot_data(run, path, config: ExperimentConfig | None = None, y: str = "cost") -> Path:
    """Write a two-column ``x,y`` CSV and a ``<path>.meta`` sidecar.

    A :class:`RunRecord` yields ``(step, cost)`` (or affinity with
    ``y="affinity"``); a :class:`DiscrepancyReport` yields
    ``(pair, abs_difference)`` in table order.
    """
    path = Path(path)
    if isinstance(run, RunRecord):
        header = ["step", y]
        if y == "cost":
            rows = [(s.step, _num(s.cost)) for s in run.steps]
        elif y == "affinity":
            rows = [(s.step, "" if s.affinity is None else _num(s.affinity)) for s in run.steps]
        else:
            raise ValueError(f"unknown y column {y!r}")
        meta = _metadata(config)
        meta.update({f"train_{k}": v for k, v in run.config.describe().items()})
        meta["rng"] = run.rng_algorithm
        if run.terminal_reason is not None:
            meta["terminal_reason"] = run.terminal_reason.value
    elif isinstance(run, DiscrepancyReport):
        header = ["pair", "abs_difference"]
        rows = [(k, _num(p.difference)) for k, p in enumerate(run.pairs)]
        meta = _metadata(config or run.config)
    else:
        raise TypeError(f"cannot emit plot data for {type(run).__name__}")
    meta["rows"] = len(rows)
    _write(path, _csv_text(header, rows))
    _write(path.with_name(path.name + ".meta"), format_metadata(meta))
    return path


def _dump_circuits(config: ExperimentConfig, x, w) -> None:
    for b in config.backends:
        _write(config.out / f"circuit_{b.value}.txt", format_circuit(build_neuron_circuit(x, w, b)))
