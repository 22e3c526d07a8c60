"""Closed-form neuron output and brute-force references.

Everything here is computed without the statevector engine so it can be
used to check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from phaseron.circuits import PhaseVector, as_phase_vector
from phaseron.errors import CapacityError, DimensionMismatchError
from phaseron.statevector import (
    CONTROLLED_PHASE,
    HADAMARD,
    Circuit,
    Gate,
)

MAX_DENSE_QUBITS = 6
SELF_CHECK_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ActivationValue:
    inner: complex
    output: float


def _pair(x, w) -> tuple[PhaseVector, PhaseVector]:
    xv, wv = as_phase_vector(x), as_phase_vector(w)
    if xv.m != wv.m:
        raise DimensionMismatchError(f"input has {xv.m} components, weights have {wv.m}")
    return xv, wv


def inner_product(x, w) -> complex:
    """``<psi_w|psi_i> = mean_j exp(i*(x_j - w_j))``."""
    xv, wv = _pair(x, w)
    return complex(np.mean(np.exp(1j * (xv.phases - wv.phases))))


def cosine_double_sum(alpha: np.ndarray) -> float:
    alpha = np.asarray(alpha, dtype=float)
    m = alpha.size
    return float(np.cos(alpha[:, None] - alpha[None, :]).sum() / m**2)


def activation(x, w) -> ActivationValue:
    xv, wv = _pair(x, w)
    z = inner_product(xv, wv)
    out = z.real * z.real + z.imag * z.imag
    via_cos = cosine_double_sum(xv.phases - wv.phases)
    if abs(out - via_cos) > SELF_CHECK_TOLERANCE:
        raise ArithmeticError(f"|inner|^2={out!r} disagrees with cosine sum {via_cos!r}")
    return ActivationValue(inner=z, output=float(out))


def activation_gradient(x, w) -> np.ndarray:
    """d(activation)/d(w_k) = (2/m^2) * sum_l sin(alpha_k - alpha_l), alpha = x - w."""
    xv, wv = _pair(x, w)
    alpha = xv.phases - wv.phases
    m = alpha.size
    return 2.0 / m**2 * np.sin(alpha[:, None] - alpha[None, :]).sum(axis=1)


def batch_activations(inputs: np.ndarray, w) -> np.ndarray:
    """Activations for every row of ``inputs`` (shape ``(n, m)``) against ``w``."""
    w = np.asarray(w, dtype=float)
    z = np.exp(1j * (np.asarray(inputs, dtype=float) - w)).mean(axis=1)
    return z.real**2 + z.imag**2


def batch_activation_gradients(inputs: np.ndarray, w) -> np.ndarray:
    """Rows are ``activation_gradient(inputs[k], w)``.

    Uses the equivalent form (2/m) * Im(exp(i*alpha_k) * conj(z)).
    """
    w = np.asarray(w, dtype=float)
    e = np.exp(1j * (np.asarray(inputs, dtype=float) - w))
    z = e.mean(axis=1, keepdims=True)
    return 2.0 / e.shape[1] * (e * np.conj(z)).imag


_I2 = np.eye(2, dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    # qubit 0 is the least significant bit, so it is the rightmost kron factor
    return reduce(np.kron, [ops.get(q, _I2) for q in reversed(range(n))])


def gate_matrix(gate: Gate, n: int) -> np.ndarray:
    if gate.kind == HADAMARD:
        local = _H
    elif gate.kind == CONTROLLED_PHASE:
        local = np.diag([1.0, np.exp(1j * gate.angle)])
    else:
        local = _X
    target_op = _embed({gate.target: local}, n)
    if not gate.controls:
        return target_op
    # I + Pi_controls (V - I); the projector commutes with V
    proj = _embed({c: _P1 for c in gate.controls}, n)
    return np.eye(1 << n, dtype=complex) + proj @ (target_op - np.eye(1 << n))


def dense_unitary(circuit: Circuit) -> np.ndarray:
    """Explicit ``2^N x 2^N`` matrix of the whole circuit."""
    n = circuit.num_qubits
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense unitary limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        g.check(n)
        u = gate_matrix(g, n) @ u
    return u


def target_state(x) -> np.ndarray:
    """The ideal encoded state ``exp(i*x_j)/sqrt(m)``."""
    return as_phase_vector(x).amplitudes()


def align_global_phase(state: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate ``state`` so that its amplitude 0 has the phase of ``reference[0]``."""
    state = np.asarray(state)
    return state * np.exp(1j * (np.angle(reference[0]) - np.angle(state[0])))
