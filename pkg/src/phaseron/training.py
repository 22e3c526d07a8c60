"""Hybrid training of a single phase-encoded neuron.

The neuron output for every sample is obtained either from the closed form,
from the exact circuit simulation or from finite-shot sampling of the
ancilla. The gradient of the output with respect to the weights always uses
the closed form; only the error terms depend on the evaluation mode.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field, fields
from typing import Iterator, Sequence

import numpy as np

from phaseron.circuits import (
    Backend,
    PhaseVector,
    as_phase_vector,
    binary_specialize,
    build_neuron_circuit,
)
from phaseron.errors import ConfigError, DimensionMismatchError
from phaseron.oracle import (
    activation,
    batch_activation_gradients,
    batch_activations,
)
from phaseron.statevector import TWO_PI, qubit_probability, run_circuit, sample_measurements

RNG_ALGORITHM = "numpy.random.PCG64"
POSITIVE_THRESHOLD = 0.5


class EvaluationMode(enum.Enum):
    ANALYTIC = "analytic"
    STATEVECTOR = "statevector"
    SAMPLED = "sampled"


class TerminalReason(enum.Enum):
    THRESHOLD_REACHED = "ThresholdReached"
    COST_INCREASED = "CostIncreased"
    MAX_STEPS = "MaxSteps"


@dataclass(frozen=True)
class TrainingSample:
    input: PhaseVector
    target: float

    def __post_init__(self):
        object.__setattr__(self, "input", as_phase_vector(self.input))
        t = float(self.target)
        if not (np.isfinite(t) and 0.0 <= t <= 1.0):
            raise ValueError(f"target must lie in [0, 1], got {self.target!r}")
        object.__setattr__(self, "target", t)


class TrainingSet:
    """Samples stored as an ``(n, m)`` phase matrix plus an ``(n,)`` target vector."""

    def __init__(self, inputs, targets):
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        targets = np.asarray(targets, dtype=float).reshape(-1)
        if inputs.shape[0] != targets.shape[0]:
            raise DimensionMismatchError(
                f"{inputs.shape[0]} inputs but {targets.shape[0]} targets"
            )
        if inputs.shape[0] == 0:
            raise ValueError("training set is empty")
        if np.any((targets < 0) | (targets > 1)) or not np.all(np.isfinite(targets)):
            raise ValueError("targets must lie in [0, 1]")
        self.inputs = np.mod(inputs, TWO_PI)
        self.targets = targets

    @classmethod
    def from_samples(cls, samples: Sequence[TrainingSample]) -> "TrainingSet":
        samples = list(samples)
        if not samples:
            raise ValueError("training set is empty")
        return cls([s.input.phases for s in samples], [s.target for s in samples])

    @property
    def m(self) -> int:
        return self.inputs.shape[1]

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __iter__(self) -> Iterator[TrainingSample]:
        for x, s in zip(self.inputs, self.targets):
            yield TrainingSample(PhaseVector(x), s)

    def __getitem__(self, k: int) -> TrainingSample:
        return TrainingSample(PhaseVector(self.inputs[k]), self.targets[k])


def as_training_set(data) -> TrainingSet:
    if isinstance(data, TrainingSet):
        return data
    return TrainingSet.from_samples(data)


@dataclass
class TrainingConfig:
    learning_rate: float = 0.1
    max_steps: int = 10_000
    cost_threshold: float = 1e-3
    stop_on_cost_increase: bool = True
    mode: EvaluationMode = EvaluationMode.ANALYTIC
    shots: int = 8192
    backend: Backend = Backend.HSGS
    seed: int = 0
    pin_first: bool = True

    def __post_init__(self):
        try:
            self.mode = EvaluationMode(self.mode)
            self.backend = Backend(self.backend)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.learning_rate > 0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.mode is EvaluationMode.SAMPLED and self.shots < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")

    def describe(self) -> dict[str, str]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.value if isinstance(v, enum.Enum) else str(v)
        return out


@dataclass
class StepRecord:
    step: int
    cost: float
    grad_norm: float
    weights: np.ndarray
    affinity: float | None = None


@dataclass
class RunRecord:
    config: TrainingConfig
    steps: list[StepRecord] = field(default_factory=list)
    terminal_reason: TerminalReason | None = None
    rng_algorithm: str = RNG_ALGORITHM
    shuffle: list[int] | None = None

    @property
    def costs(self) -> np.ndarray:
        return np.array([s.cost for s in self.steps])

    @property
    def affinities(self) -> np.ndarray:
        return np.array([np.nan if s.affinity is None else s.affinity for s in self.steps])

    @property
    def final_cost(self) -> float:
        return self.steps[-1].cost

    def header_comment(self) -> str:
        items = dict(self.config.describe())
        items["rng"] = self.rng_algorithm
        items["terminal_reason"] = self.terminal_reason.value if self.terminal_reason else ""
        if self.shuffle is not None:
            items["shuffle"] = " ".join(str(i) for i in self.shuffle)
        return "# " + "; ".join(f"{k}={v}" for k, v in items.items())

    def to_csv(self) -> str:
        """Serialize as ``step,cost,grad_norm[,affinity],w_0..w_{m-1}``."""
        buf = io.StringIO()
        buf.write(self.header_comment() + "\r\n")
        m = len(self.steps[0].weights) if self.steps else 0
        has_aff = any(s.affinity is not None for s in self.steps)
        header = ["step", "cost", "grad_norm"] + (["affinity"] if has_aff else [])
        header += [f"w_{j}" for j in range(m)]
        writer = csv.writer(buf)
        writer.writerow(header)
        for s in self.steps:
            row = [s.step, repr(s.cost), repr(s.grad_norm)]
            if has_aff:
                row.append("" if s.affinity is None else repr(s.affinity))
            row += [repr(float(v)) for v in s.weights]
            writer.writerow(row)
        return buf.getvalue()


# -- evaluation -------------------------------------------------------------

def _circuit_probability(x: np.ndarray, w: np.ndarray, backend: Backend) -> float:
    circ = build_neuron_circuit(x, w, backend)
    state = run_circuit(circ)
    return qubit_probability(state, circ.num_qubits - 1)


def activations(
    w,
    data,
    mode: EvaluationMode = EvaluationMode.ANALYTIC,
    *,
    backend: Backend = Backend.HSGS,
    shots: int = 8192,
    rng: np.random.Generator | int | None = None,
) -> np.ndarray:
    """Neuron outputs for every sample under the chosen evaluation mode."""
    data = as_training_set(data)
    w = as_phase_vector(w).phases
    if w.size != data.m:
        raise DimensionMismatchError(f"weights have {w.size} components, inputs {data.m}")
    mode = EvaluationMode(mode)
    if mode is EvaluationMode.ANALYTIC:
        return batch_activations(data.inputs, w)
    if mode is EvaluationMode.STATEVECTOR:
        return np.array([_circuit_probability(x, w, backend) for x in data.inputs])
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    out = np.empty(len(data))
    for k, x in enumerate(data.inputs):
        circ = build_neuron_circuit(x, w, backend)
        state = run_circuit(circ)
        _, ones = sample_measurements(state, circ.num_qubits - 1, shots, rng)
        out[k] = ones / shots
    return out


def _cost_from(outputs: np.ndarray, targets: np.ndarray) -> float:
    err = targets - outputs
    return float(np.dot(err, err) / (2 * len(err)))


def _gradient_from(outputs: np.ndarray, data: TrainingSet, w: np.ndarray) -> np.ndarray:
    err = data.targets - outputs
    grads = batch_activation_gradients(data.inputs, w)
    return -(err @ grads) / len(err)


def cost(w, data, mode: EvaluationMode = EvaluationMode.ANALYTIC, **kwargs) -> float:
    """Halved mean squared error ``(1/2n) * sum_k (s_k - output_k)^2``."""
    data = as_training_set(data)
    return _cost_from(activations(w, data, mode, **kwargs), data.targets)


def cost_gradient(w, data, mode: EvaluationMode = EvaluationMode.ANALYTIC, **kwargs) -> np.ndarray:
    """``-(1/n) * sum_k error_k * grad_w(output_k)`` with the closed-form output gradient."""
    data = as_training_set(data)
    w = as_phase_vector(w).phases
    return _gradient_from(activations(w, data, mode, **kwargs), data, w)


def gradient_descent_step(
    w,
    data,
    eta: float,
    mode: EvaluationMode = EvaluationMode.ANALYTIC,
    *,
    pin_first: bool = False,
    **kwargs,
) -> PhaseVector:
    if not eta > 0:
        raise ConfigError(f"learning rate must be positive, got {eta}")
    w = as_phase_vector(w).phases
    g = cost_gradient(w, data, mode, **kwargs)
    if pin_first:
        g[0] = 0.0
    return PhaseVector(w - eta * g)


def affinity(w, objective) -> float:
    """Squared overlap of the current and objective weight states."""
    return activation(w, objective).output


# -- training loops ---------------------------------------------------------

def train(config: TrainingConfig, data, w0, objective=None) -> RunRecord:
    """Full-batch gradient descent until the cost threshold, a cost increase or max_steps.

    With ``config.pin_first`` the weights are shifted so that component 0 is
    zero (the output only depends on phase differences) and that component is
    never updated.
    """
    data = as_training_set(data)
    w = as_phase_vector(w0).phases.copy()
    if w.size != data.m:
        raise DimensionMismatchError(f"weights have {w.size} components, inputs {data.m}")
    if config.pin_first:
        w = np.mod(w - w[0], TWO_PI)
    obj = None if objective is None else as_phase_vector(objective)
    rng = np.random.default_rng(config.seed)
    record = RunRecord(config=config)
    eval_kwargs = dict(backend=config.backend, shots=config.shots, rng=rng)

    prev = None
    for step in range(config.max_steps + 1):
        outputs = activations(w, data, config.mode, **eval_kwargs)
        c = _cost_from(outputs, data.targets)
        g = _gradient_from(outputs, data, w)
        if config.pin_first:
            g[0] = 0.0
        record.steps.append(
            StepRecord(
                step=step,
                cost=c,
                grad_norm=float(np.linalg.norm(g)),
                weights=w.copy(),
                affinity=None if obj is None else affinity(w, obj),
            )
        )
        if c < config.cost_threshold:
            record.terminal_reason = TerminalReason.THRESHOLD_REACHED
            break
        if config.stop_on_cost_increase and prev is not None and c > prev:
            record.terminal_reason = TerminalReason.COST_INCREASED
            break
        if step == config.max_steps:
            record.terminal_reason = TerminalReason.MAX_STEPS
            break
        w = np.mod(w - config.learning_rate * g, TWO_PI)
        prev = c
    return record


def random_phase_vector(rng: np.random.Generator, m: int, pin_first: bool = False) -> PhaseVector:
    phases = rng.uniform(0.0, TWO_PI, size=m)
    if pin_first:
        phases[0] = 0.0
    return PhaseVector(phases)


def make_sigmoid_dataset(
    rng: np.random.Generator, m: int = 4, n_samples: int = 200
) -> tuple[PhaseVector, TrainingSet]:
    """Random objective weights (component 0 pinned) and inputs labelled by the exact output."""
    objective = random_phase_vector(rng, m, pin_first=True)
    inputs = rng.uniform(0.0, TWO_PI, size=(n_samples, m))
    return objective, TrainingSet(inputs, batch_activations(inputs, objective.phases))


# -- binary perceptron ------------------------------------------------------

def _as_bits(v) -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim != 1 or not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"expected a +/-1 vector, got {v!r}")
    return arr.astype(int)


def make_binary_dataset(
    objective,
    rng: np.random.Generator,
    n_positive: int = 5,
    n_negative: int = 50,
    budget: int = 100_000,
) -> TrainingSet:
    """Rejection-sample random +/-1 inputs until the positive/negative quotas are met.

    A sample is positive when its output against ``objective`` is at least 0.5.
    """
    obj = binary_specialize(_as_bits(objective))
    m = obj.m
    pos, neg = [], []
    for _ in range(budget):
        if len(pos) >= n_positive and len(neg) >= n_negative:
            break
        bits = rng.choice((-1, 1), size=m)
        xv = binary_specialize(bits)
        if affinity(xv, obj) >= POSITIVE_THRESHOLD:
            if len(pos) < n_positive:
                pos.append(xv.phases)
        elif len(neg) < n_negative:
            neg.append(xv.phases)
    else:
        if len(pos) < n_positive or len(neg) < n_negative:
            raise ConfigError(
                f"collected {len(pos)}/{n_positive} positive and {len(neg)}/{n_negative} "
                f"negative samples after {budget} draws; try a different seed"
            )
    inputs = np.array(pos + neg)
    targets = np.array([1.0] * len(pos) + [0.0] * len(neg))
    return TrainingSet(inputs, targets)


def _best_flip(bits: np.ndarray, x: PhaseVector, target: float) -> int | None:
    current = abs(target - affinity(x, binary_specialize(bits)))
    best, best_err = None, current
    for i in range(bits.size):
        trial = bits.copy()
        trial[i] = -trial[i]
        err = abs(target - affinity(x, binary_specialize(trial)))
        if err < best_err - 1e-15:
            best, best_err = i, err
    return best


def train_binary_perceptron(
    config: TrainingConfig, data, objective, w0, rng: np.random.Generator | None = None
) -> RunRecord:
    """Single-sample flip-rule training of a +/-1 weight vector.

    Each step presents the next sample of a shuffled order (wrapping around).
    A misclassified sample flips the weight component whose flip reduces that
    sample's error the most (lowest index on ties). Training stops when the
    affinity with ``objective`` reaches 1 or after ``config.max_steps`` steps.
    """
    data = as_training_set(data)
    obj_bits = _as_bits(objective)
    bits = _as_bits(w0).copy()
    if not np.all(np.isin(data.inputs, (0.0, np.pi))):
        raise ValueError("binary training requires inputs with phases in {0, pi}")
    if obj_bits.size != data.m or bits.size != data.m:
        raise DimensionMismatchError("objective, weights and inputs must share one dimension")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    obj = binary_specialize(obj_bits)
    order = rng.permutation(len(data))
    record = RunRecord(config=config, shuffle=[int(i) for i in order])
    eval_kwargs = dict(backend=config.backend, shots=config.shots, rng=rng)

    def log(step: int) -> float:
        wv = binary_specialize(bits)
        g = cost_gradient(wv, data)
        aff = affinity(wv, obj)
        record.steps.append(
            StepRecord(step, cost(wv, data), float(np.linalg.norm(g)), wv.phases.copy(), aff)
        )
        return aff

    if log(0) >= 1.0 - 1e-12:
        record.terminal_reason = TerminalReason.THRESHOLD_REACHED
        return record
    for step in range(1, config.max_steps + 1):
        k = int(order[(step - 1) % len(data)])
        x = PhaseVector(data.inputs[k])
        target = data.targets[k]
        out = activations(binary_specialize(bits), TrainingSet([x.phases], [target]),
                          config.mode, **eval_kwargs)[0]
        if (out >= POSITIVE_THRESHOLD) != (target >= POSITIVE_THRESHOLD):
            i = _best_flip(bits, x, target)
            if i is not None:
                bits[i] = -bits[i]
        if log(step) >= 1.0 - 1e-12:
            record.terminal_reason = TerminalReason.THRESHOLD_REACHED
            return record
    record.terminal_reason = TerminalReason.MAX_STEPS
    return record


def padded_affinities(records: Sequence[RunRecord], length: int) -> np.ndarray:
    """Stack per-step affinities, carrying each run's last value forward to ``length``."""
    out = np.empty((len(records), length))
    for r, rec in enumerate(records):
        a = rec.affinities
        out[r, : a.size] = a[:length]
        out[r, a.size :] = a[-1]
    return out
