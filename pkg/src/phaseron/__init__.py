"""Phase-encoded quantum neuron: statevector simulation, circuit synthesis and training."""

from phaseron.errors import (
    CapacityError,
    ConfigError,
    CorruptedStateError,
    DimensionMismatchError,
    InvalidGateError,
    PhaseronError,
)
from phaseron.statevector import (
    Circuit,
    Gate,
    QuantumState,
    apply_gate,
    probability_of_basis_state,
    run_circuit,
    sample_measurements,
)
from phaseron.circuits import (
    Backend,
    GateCostReport,
    PhaseVector,
    binary_specialize,
    build_input_operator,
    build_neuron_circuit,
    build_weight_operator,
    format_circuit,
    gate_cost,
    hsgs_phase_stage,
    parse_circuit,
    rotation_block,
)
from phaseron.oracle import (
    ActivationValue,
    activation,
    activation_gradient,
    dense_unitary,
    inner_product,
)

__version__ = "0.1.0"
