import numpy as np
import pytest

from phaseron.statevector import Circuit, Gate, QuantumState


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return QuantumState(n, v / np.linalg.norm(v))


def random_gate(rng, n):
    kind = rng.choice(["H", "X", "P", "MCX"] if n > 1 else ["H", "X", "P"])
    qubits = rng.permutation(n)
    target = int(qubits[0])
    if kind in ("H", "X"):
        return Gate(kind, target)
    if kind == "P":
        k = int(rng.integers(0, n))
        return Gate("P", target, tuple(int(q) for q in qubits[1 : 1 + k]), rng.uniform(-10, 10))
    k = int(rng.integers(1, n))
    return Gate("MCX", target, tuple(int(q) for q in qubits[1 : 1 + k]))


def random_circuit(rng, n, length):
    return Circuit(n, [random_gate(rng, n) for _ in range(length)])


def random_phases(rng, m):
    return rng.uniform(0, 2 * np.pi, size=m)
