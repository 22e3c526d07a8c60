"""
Inner products with a phase-encoded neuron
==========================================

Encode two vectors of phases on a 2-qubit register, build the neuron circuit
with both synthesis backends and read the overlap from the ancilla.
"""

import numpy as np

from phaseron import Backend, activation, build_neuron_circuit, gate_cost, run_circuit
from phaseron.statevector import qubit_probability, sample_measurements

rng = np.random.default_rng(7)
x = rng.uniform(0, 2 * np.pi, 4)
w = rng.uniform(0, 2 * np.pi, 4)

############################################################
# The closed form: |<psi_w|psi_x>|^2 as a cosine double sum

exact = activation(x, w)
print("inner product", exact.inner, "output", exact.output)

############################################################
# The same number from the circuit, for each backend. The ancilla is qubit 2.

for backend in Backend:
    circ = build_neuron_circuit(x, w, backend)
    state = run_circuit(circ)
    p = qubit_probability(state, 2)
    c0, c1 = sample_measurements(state, 2, shots=8192, seed=1)
    print(f"{backend.value:9s} exact {p:.6f}  sampled {c1 / 8192:.6f}  {gate_cost(circ)}")
