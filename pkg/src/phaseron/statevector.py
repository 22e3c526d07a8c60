"""Dense statevector simulation.

Basis index ``j`` stores qubit 0 in its least significant bit, so the ket
``|q_{n-1} ... q_1 q_0>`` corresponds to ``j = sum(q_k << k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from phaseron.errors import CorruptedStateError, InvalidGateError

TWO_PI = 2.0 * np.pi
NORM_TOLERANCE = 1e-6

HADAMARD = "H"
PAULI_X = "X"
CONTROLLED_PHASE = "P"
MULTI_CONTROLLED_X = "MCX"
GATE_KINDS = (HADAMARD, PAULI_X, CONTROLLED_PHASE, MULTI_CONTROLLED_X)


def normalize_angle(angle: float) -> float:
    """Map an angle to the canonical interval [0, 2*pi)."""
    a = float(np.mod(angle, TWO_PI))
    # np.mod can return exactly 2*pi for tiny negative inputs
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Gate:
    """One gate of the supported set.

    ``kind`` is one of ``"H"``, ``"X"``, ``"P"`` (phase, any number of
    controls, ``u1`` when uncontrolled) or ``"MCX"`` (at least one control).
    """

    kind: str
    target: int
    controls: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidGateError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "target", int(self.target))
        if self.kind == CONTROLLED_PHASE:
            if self.angle is None or not np.isfinite(self.angle):
                raise InvalidGateError("phase gate needs a finite angle")
            object.__setattr__(self, "angle", normalize_angle(self.angle))
        elif self.angle is not None:
            raise InvalidGateError(f"{self.kind} gate takes no angle")
        if self.kind in (HADAMARD, PAULI_X) and self.controls:
            raise InvalidGateError(f"{self.kind} gate takes no controls; use MCX")
        if self.kind == MULTI_CONTROLLED_X and not self.controls:
            raise InvalidGateError("MCX requires at least one control")
        qubits = (self.target, *self.controls)
        if len(set(qubits)) != len(qubits):
            raise InvalidGateError(f"repeated qubit index in {qubits}")
        if min(qubits) < 0:
            raise InvalidGateError(f"negative qubit index in {qubits}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target, *self.controls)

    def inverse(self) -> "Gate":
        if self.kind == CONTROLLED_PHASE:
            return Gate(CONTROLLED_PHASE, self.target, self.controls, -self.angle)
        return self

    def check(self, num_qubits: int) -> None:
        if max(self.qubits) >= num_qubits:
            raise InvalidGateError(
                f"{self.kind} on qubits {self.qubits} does not fit a {num_qubits}-qubit register"
            )


def h(target: int) -> Gate:
    return Gate(HADAMARD, target)


def x(target: int) -> Gate:
    return Gate(PAULI_X, target)


def phase(angle: float, target: int, controls: Iterable[int] = ()) -> Gate:
    return Gate(CONTROLLED_PHASE, target, tuple(controls), angle)


def mcx(controls: Iterable[int], target: int) -> Gate:
    return Gate(MULTI_CONTROLLED_X, target, tuple(controls))


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InvalidGateError("a circuit needs at least one qubit")
        for g in self.gates:
            g.check(self.num_qubits)

    def append(self, gate: Gate) -> "Circuit":
        gate.check(self.num_qubits)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)])

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, num_qubits: int) -> "QuantumState":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "QuantumState":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "QuantumState":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(np.log2(len(amps)))
        return cls(n, amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "QuantumState":
        return QuantumState(self.num_qubits, self.amplitudes.copy())


@lru_cache(maxsize=64)
def _basis_indices(num_qubits: int) -> np.ndarray:
    idx = np.arange(1 << num_qubits, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def _check_normalized(state: QuantumState) -> None:
    n2 = state.norm_squared()
    if abs(n2 - 1.0) > NORM_TOLERANCE:
        raise CorruptedStateError(f"state norm^2 is {n2!r}, expected 1")


def _apply_inplace(amps: np.ndarray, num_qubits: int, gate: Gate) -> None:
    idx = _basis_indices(num_qubits)
    tbit = 1 << gate.target
    cmask = 0
    for c in gate.controls:
        cmask |= 1 << c

    if gate.kind == CONTROLLED_PHASE:
        full = cmask | tbit
        sel = idx[(idx & full) == full]
        amps[sel] *= np.exp(1j * gate.angle)
        return

    lo = idx[(idx & (cmask | tbit)) == cmask]
    hi = lo | tbit
    a = amps[lo]
    b = amps[hi]
    if gate.kind == HADAMARD:
        s = 1.0 / np.sqrt(2.0)
        amps[lo] = (a + b) * s
        amps[hi] = (a - b) * s
    else:
        amps[lo] = b
        amps[hi] = a


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Return a new state with ``gate`` applied; the input is left untouched."""
    gate.check(state.num_qubits)
    _check_normalized(state)
    out = state.amplitudes.copy()
    _apply_inplace(out, state.num_qubits, gate)
    return QuantumState(state.num_qubits, out)


def run_circuit(circuit: Circuit, initial: QuantumState | None = None) -> QuantumState:
    """Apply the gates of ``circuit`` in order, starting from ``initial`` (default |0...0>)."""
    if initial is None:
        initial = QuantumState.zero(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise InvalidGateError(
            f"circuit acts on {circuit.num_qubits} qubits, state has {initial.num_qubits}"
        )
    _check_normalized(initial)
    out = initial.amplitudes.copy()
    for g in circuit.gates:
        g.check(circuit.num_qubits)
        _apply_inplace(out, circuit.num_qubits, g)
    return QuantumState(circuit.num_qubits, out)


def probability_of_basis_state(state: QuantumState, index: int) -> float:
    if not 0 <= index < len(state.amplitudes):
        raise IndexError(f"basis index {index} out of range for {state.num_qubits} qubits")
    a = state.amplitudes[index]
    return float(a.real * a.real + a.imag * a.imag)


def qubit_probability(state: QuantumState, qubit: int) -> float:
    """Marginal probability of reading 1 on ``qubit``."""
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.num_qubits} qubits")
    idx = _basis_indices(state.num_qubits)
    probs = np.abs(state.amplitudes[(idx >> qubit) & 1 == 1]) ** 2
    return float(min(1.0, max(0.0, probs.sum())))


def sample_measurements(
    state: QuantumState, qubit: int, shots: int, seed: int | np.random.Generator
) -> tuple[int, int]:
    """Measure ``qubit`` ``shots`` times and return ``(count0, count1)``.

    ``seed`` may be an integer or an existing numpy Generator (which is then
    advanced).
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p1 = qubit_probability(state, qubit)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    count1 = int(rng.binomial(shots, p1))
    return shots - count1, count1
