"""
Phase rotation blocks versus HSGS
=================================

Both backends prepare the same state. Rotation blocks spend one fully
controlled phase per basis state; HSGS decomposes the phases over qubit
subsets and needs fewer controlled gates.
"""

import numpy as np

from phaseron import Backend, build_input_operator, format_circuit, gate_cost, run_circuit
from phaseron.circuits import hsgs_corrections, PhaseVector

x = np.array([0.0, 0.4, 1.1, 2.0, 0.3, 2.9, 1.7, 0.8])

############################################################
# Subset angles. Key ``s`` is a bit mask: the phase is applied when all
# qubits in ``s`` are 1.

for s, theta in hsgs_corrections(PhaseVector(x)).items():
    print(f"{s:03b}  {theta:+.4f}")

############################################################
# Circuits and their costs

for backend in Backend:
    circ = build_input_operator(x, backend)
    print(f"--- {backend.value}: {gate_cost(circ)}")
    print(format_circuit(circ))

############################################################
# Same state up to a global phase

a = run_circuit(build_input_operator(x, Backend.ROTATION)).amplitudes
b = run_circuit(build_input_operator(x, Backend.HSGS)).amplitudes
b = b * np.exp(1j * (np.angle(a[0]) - np.angle(b[0])))
print("max difference", np.abs(a - b).max())

############################################################
# Cost across register sizes (random phases)

rng = np.random.default_rng(0)
for n in range(1, 7):
    xs = rng.uniform(0, 2 * np.pi, 1 << n)
    rot = gate_cost(build_input_operator(xs, Backend.ROTATION))
    hs = gate_cost(build_input_operator(xs, Backend.HSGS))
    print(f"N={n}: controlled gates rotation={rot.multi_controlled_count:3d} hsgs={hs.multi_controlled_count:3d}")
