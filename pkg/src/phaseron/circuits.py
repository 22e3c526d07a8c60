"""Circuit synthesis for the phase-encoded neuron.

Two interchangeable backends build the diagonal phase layer that turns the
uniform superposition into ``(1/sqrt(m)) * exp(i * x_j)``:

* ``Backend.ROTATION``: one phase rotation block per basis state. The block
  maps state ``j`` onto ``|1...1>`` with NOT gates, applies a phase controlled
  on every register qubit and undoes the NOTs.
* ``Backend.HSGS``: hypergraph-state style synthesis. Phases are decomposed
  over subsets of qubits and applied by increasing control count, so one
  ``c^p u1`` gate serves every basis state sharing those ``p`` set bits.

Both realize the target state up to a single global phase.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from phaseron.errors import DimensionMismatchError
from phaseron.statevector import (
    CONTROLLED_PHASE,
    TWO_PI,
    Circuit,
    Gate,
    h,
    mcx,
    phase,
    x,
)

ZERO_ANGLE_TOLERANCE = 1e-12


class Backend(enum.Enum):
    ROTATION = "rotation"
    HSGS = "hsgs"


class PhaseVector:
    """``m = 2**N`` phases in radians, stored canonically in [0, 2*pi)."""

    __slots__ = ("phases",)

    def __init__(self, phases: Sequence[float]):
        arr = np.asarray(phases, dtype=float).reshape(-1)
        m = arr.size
        if m < 2 or m & (m - 1):
            raise ValueError(f"phase vector length must be a power of two >= 2, got {m}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("phases must be finite")
        arr = np.mod(arr, TWO_PI)
        arr[arr >= TWO_PI] = 0.0
        arr.setflags(write=False)
        self.phases = arr

    @property
    def m(self) -> int:
        return self.phases.size

    @property
    def n_qubits(self) -> int:
        return self.m.bit_length() - 1

    def amplitudes(self) -> np.ndarray:
        return np.exp(1j * self.phases) / np.sqrt(self.m)

    def shifted(self, delta: float) -> "PhaseVector":
        return PhaseVector(self.phases + delta)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.phases, dtype=dtype)

    def __len__(self) -> int:
        return self.m

    def __eq__(self, other) -> bool:
        return isinstance(other, PhaseVector) and np.array_equal(self.phases, other.phases)

    def __hash__(self) -> int:
        return hash(self.phases.tobytes())

    def __repr__(self) -> str:
        return f"PhaseVector({np.array2string(self.phases, precision=6, separator=', ')})"


def as_phase_vector(v) -> PhaseVector:
    return v if isinstance(v, PhaseVector) else PhaseVector(v)


def _is_zero_angle(angle: float) -> bool:
    a = float(np.mod(angle, TWO_PI))
    return a < ZERO_ANGLE_TOLERANCE or TWO_PI - a < ZERO_ANGLE_TOLERANCE


def rotation_block(n_qubits: int, j: int, angle: float) -> Circuit:
    """Circuit multiplying the amplitude of basis state ``j`` by ``exp(i*angle)``.

    The phase gate targets qubit ``n_qubits - 1`` and is controlled on all
    lower qubits.
    """
    if not 0 <= j < (1 << n_qubits):
        raise IndexError(f"basis index {j} out of range for {n_qubits} qubits")
    flips = [x(q) for q in range(n_qubits) if not (j >> q) & 1]
    circ = Circuit(n_qubits, list(flips))
    circ.append(phase(angle, n_qubits - 1, range(n_qubits - 1)))
    circ.extend(flips)
    return circ


def _rotation_phase_stage(phases: PhaseVector, sign: int) -> Circuit:
    n = phases.n_qubits
    circ = Circuit(n)
    for j, lam in enumerate(phases.phases):
        if _is_zero_angle(lam):
            continue
        circ.extend(rotation_block(n, j, sign * lam).gates)
    return circ


def hsgs_corrections(phases: PhaseVector) -> dict[int, float]:
    """Subset angles ``theta_S`` whose products reproduce the phase diagonal.

    Keys are bit masks ``S`` (nonzero); the returned mapping reproduces
    ``phases - phases[0]`` as ``sum(theta_T for T subset of j)``. Each
    correction is the target phase of ``S`` minus everything already applied
    by proper nonempty subsets, evaluated in order of increasing popcount.
    """
    rel = phases.phases - phases.phases[0]
    m = phases.m
    order = sorted(range(1, m), key=lambda s: (bin(s).count("1"), s))
    theta: dict[int, float] = {}
    for s in order:
        induced = 0.0
        t = (s - 1) & s
        while t:
            induced += theta[t]
            t = (t - 1) & s
        theta[s] = rel[s] - induced
    return theta


def hsgs_phase_stage(phases, sign: int = 1) -> Circuit:
    """Phase layer built from parity-ordered ``c^p u1`` corrections.

    Starting from the uniform superposition it applies
    ``exp(i * sign * phases[j])`` to every basis state, up to a global phase.
    Index 0 is never touched: phases are first made relative to
    ``phases[0]``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    phases = as_phase_vector(phases)
    n = phases.n_qubits
    circ = Circuit(n)
    for s, angle in hsgs_corrections(phases).items():
        if _is_zero_angle(angle):
            continue
        bits = [q for q in range(n) if (s >> q) & 1]
        circ.append(phase(sign * angle, bits[-1], bits[:-1]))
    return circ


def _phase_stage(phases: PhaseVector, sign: int, backend: Backend) -> Circuit:
    backend = Backend(backend)
    if backend is Backend.ROTATION:
        return _rotation_phase_stage(phases, sign)
    return hsgs_phase_stage(phases, sign)


def build_input_operator(x_phases, backend: Backend = Backend.HSGS) -> Circuit:
    """``U_i``: maps |0...0> to ``(1/sqrt(m)) * exp(i * x_j)`` (up to global phase)."""
    xv = as_phase_vector(x_phases)
    n = xv.n_qubits
    circ = Circuit(n, [h(q) for q in range(n)])
    circ.extend(_phase_stage(xv, +1, backend).gates)
    return circ


def build_weight_operator(w_phases, backend: Backend = Backend.HSGS) -> Circuit:
    """``U_w``: maps the weight state onto |1...1> (up to global phase).

    Its last row holds the conjugated weights, so applied to an input state
    the amplitude of |1...1> is the inner product.
    """
    wv = as_phase_vector(w_phases)
    n = wv.n_qubits
    circ = _phase_stage(wv, -1, backend)
    circ.extend(h(q) for q in range(n))
    circ.extend(x(q) for q in range(n))
    return circ


def build_neuron_circuit(x_phases, w_phases, backend: Backend = Backend.HSGS) -> Circuit:
    """Full neuron: ``U_i``, ``U_w`` and a multi-controlled NOT onto the ancilla.

    The ancilla is qubit ``N`` (the most significant bit); its probability of
    reading 1 equals ``|<psi_w|psi_i>|**2``.
    """
    xv, wv = as_phase_vector(x_phases), as_phase_vector(w_phases)
    if xv.m != wv.m:
        raise DimensionMismatchError(f"input has {xv.m} components, weights have {wv.m}")
    n = xv.n_qubits
    circ = Circuit(n + 1)
    circ.extend(build_input_operator(xv, backend).gates)
    circ.extend(build_weight_operator(wv, backend).gates)
    circ.append(mcx(range(n), n))
    return circ


def binary_specialize(bits) -> PhaseVector:
    """Map a +/-1 vector onto phases: +1 -> 0, -1 -> pi."""
    arr = np.asarray(bits)
    if arr.ndim != 1 or not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"binary vectors must contain only +1/-1 entries, got {bits!r}")
    return PhaseVector(np.where(arr == 1, 0.0, np.pi))


@dataclass(frozen=True)
class GateCostReport:
    total_gates: int
    multi_controlled_count: int
    max_control_arity: int


def gate_cost(circuit: Circuit) -> GateCostReport:
    """Count gates; any gate with one or more controls is multi-controlled."""
    controlled = [len(g.controls) for g in circuit.gates if g.controls]
    return GateCostReport(
        total_gates=len(circuit.gates),
        multi_controlled_count=len(controlled),
        max_control_arity=max(controlled, default=0),
    )


# Text format: first line "# qubits: N", then one gate per line:
#   KIND target [c0,c1,...] angle
# controls are omitted when empty, angle only for P gates.

def format_circuit(circuit: Circuit) -> str:
    lines = [f"# qubits: {circuit.num_qubits}"]
    for g in circuit.gates:
        parts = [g.kind, str(g.target)]
        if g.controls:
            parts.append("[" + ",".join(str(c) for c in g.controls) + "]")
        if g.kind == CONTROLLED_PHASE:
            parts.append(repr(g.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


_LINE = re.compile(r"^(?P<kind>[A-Z]+)\s+(?P<target>\d+)(?:\s+\[(?P<controls>[\d,\s]*)\])?(?:\s+(?P<angle>\S+))?$")


def parse_circuit(text: str) -> Circuit:
    num_qubits = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*qubits:\s*(\d+)", line)
            if m:
                num_qubits = int(m.group(1))
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        controls = tuple(int(c) for c in (m.group("controls") or "").split(",") if c.strip())
        angle = float(m.group("angle")) if m.group("angle") is not None else None
        gates.append(Gate(m.group("kind"), int(m.group("target")), controls, angle))
    if num_qubits is None:
        num_qubits = max((max(g.qubits) for g in gates), default=0) + 1
    return Circuit(num_qubits, gates)
