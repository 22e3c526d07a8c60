import itertools

import numpy as np
import pytest

from conftest import random_phases, random_state
from phaseron.circuits import (
    Backend,
    PhaseVector,
    binary_specialize,
    build_input_operator,
    build_neuron_circuit,
    build_weight_operator,
    format_circuit,
    gate_cost,
    hsgs_corrections,
    hsgs_phase_stage,
    parse_circuit,
    rotation_block,
)
from phaseron.errors import DimensionMismatchError
from phaseron.oracle import dense_unitary
from phaseron.statevector import (
    Circuit,
    QuantumState,
    h,
    probability_of_basis_state,
    qubit_probability,
    run_circuit,
)

BACKENDS = list(Backend)


def uniform(n):
    return QuantumState(n, np.full(1 << n, 2 ** (-n / 2)))


def phase_aligned(a, b):
    """Divide out the phase of amplitude 0 of each vector."""
    return a * np.exp(-1j * np.angle(a[0])), b * np.exp(-1j * np.angle(b[0]))


def ancilla_probability(x, w, backend):
    circ = build_neuron_circuit(x, w, backend)
    return qubit_probability(run_circuit(circ), circ.num_qubits - 1)


def direct_inner(x, w):
    # oracle: explicit vectors, explicit conjugate dot product
    m = len(x)
    psi_i = np.exp(1j * np.asarray(x)) / np.sqrt(m)
    psi_w = np.exp(1j * np.asarray(w)) / np.sqrt(m)
    return np.sum(np.conj(psi_w) * psi_i)


class TestPhaseVector:
    def test_canonical_range(self):
        pv = PhaseVector([-np.pi, 0, 2 * np.pi, 7.0])
        assert np.all((pv.phases >= 0) & (pv.phases < 2 * np.pi))
        np.testing.assert_allclose(pv.phases, [np.pi, 0, 0, 7.0 - 2 * np.pi])

    @pytest.mark.parametrize("bad", [[0.0], [0, 1, 2], [0, np.nan], []])
    def test_rejects_bad_length_or_values(self, bad):
        with pytest.raises(ValueError):
            PhaseVector(bad)


class TestRotationBlock:
    def test_b23_touches_only_last(self):
        lam = 0.7
        circ = rotation_block(2, 3, lam)
        assert [g.kind for g in circ.gates] == ["P"]
        out = run_circuit(circ, uniform(2)).amplitudes
        np.testing.assert_allclose(out, 0.5 * np.array([1, 1, 1, np.exp(1j * lam)]), atol=1e-15)

    def test_b20_pi(self):
        out = run_circuit(rotation_block(2, 0, np.pi), uniform(2)).amplitudes
        np.testing.assert_allclose(out, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)

    def test_gate_layout(self):
        circ = rotation_block(3, 5, 1.0)  # 5 = 0b101: qubit 1 is zero
        kinds = [(g.kind, g.target, g.controls) for g in circ.gates]
        assert kinds == [("X", 1, ()), ("P", 2, (0, 1)), ("X", 1, ())]

    def test_b35_against_diagonal_oracle(self, rng):
        lam = rng.uniform(0, 2 * np.pi)
        s = random_state(rng, 3)
        diag = np.ones(8, complex)
        diag[5] = np.exp(1j * lam)
        np.testing.assert_allclose(
            run_circuit(rotation_block(3, 5, lam), s).amplitudes, diag * s.amplitudes, atol=1e-12
        )

    def test_locality_all_blocks(self, rng):
        for n in range(1, 5):
            for j in range(1 << n):
                s = random_state(rng, n)
                lam = rng.uniform(0, 2 * np.pi)
                out = run_circuit(rotation_block(n, j, lam), s).amplitudes
                others = np.arange(1 << n) != j
                np.testing.assert_allclose(out[others], s.amplitudes[others], atol=1e-12, rtol=0)
                assert abs(out[j] - np.exp(1j * lam) * s.amplitudes[j]) < 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            rotation_block(2, 4, 0.1)


class TestInputOperator:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_zero_phases_uniform(self, backend):
        out = run_circuit(build_input_operator([0, 0, 0, 0], backend)).amplitudes
        np.testing.assert_allclose(out, np.full(4, 0.5), atol=1e-15)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_pi_on_last(self, backend):
        out = run_circuit(build_input_operator([0, 0, 0, np.pi], backend)).amplitudes
        np.testing.assert_allclose(out, [0.5, 0.5, 0.5, -0.5], atol=1e-15)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_first_column_property(self, rng, backend):
        for _ in range(200):
            n = int(rng.integers(1, 5))
            xs = random_phases(rng, 1 << n)
            got = run_circuit(build_input_operator(xs, backend)).amplitudes
            want = np.exp(1j * xs) / np.sqrt(1 << n)
            a, b = phase_aligned(got, want)
            np.testing.assert_allclose(a, b, atol=1e-9)

    def test_backends_agree_n3(self, rng):
        xs = random_phases(rng, 8)
        a, b = phase_aligned(
            run_circuit(build_input_operator(xs, Backend.ROTATION)).amplitudes,
            run_circuit(build_input_operator(xs, Backend.HSGS)).amplitudes,
        )
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_rotation_skips_zero_angles(self):
        circ = build_input_operator([0, 0, 1e-13, 2 * np.pi - 1e-13], Backend.ROTATION)
        assert [g.kind for g in circ.gates] == ["H", "H"]


class TestWeightOperator:
    def test_zero_weights(self):
        for backend in BACKENDS:
            circ = build_weight_operator([0, 0, 0, 0], backend)
            assert [g.kind for g in circ.gates] == ["H", "H", "X", "X"]
            out = run_circuit(circ, uniform(2))
            assert probability_of_basis_state(out, 3) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_maps_weight_state_to_last(self, rng, backend):
        for _ in range(500):
            n = int(rng.integers(1, 5))
            w = random_phases(rng, 1 << n)
            psi_w = QuantumState(n, np.exp(1j * w) / np.sqrt(1 << n))
            out = run_circuit(build_weight_operator(w, backend), psi_w)
            assert abs(probability_of_basis_state(out, (1 << n) - 1) - 1) < 1e-10

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_last_amplitude_is_inner_product(self, rng, backend):
        for _ in range(50):
            n = int(rng.integers(1, 4))
            m = 1 << n
            xs, w = random_phases(rng, m), random_phases(rng, m)
            psi_x = QuantumState(n, np.exp(1j * xs) / np.sqrt(m))
            out = run_circuit(build_weight_operator(w, backend), psi_x).amplitudes
            expected = np.mean(np.exp(1j * (xs - w)))
            # equal up to the global phase the builder is allowed to introduce
            assert abs(abs(out[-1]) - abs(expected)) < 1e-10
            if backend is Backend.ROTATION:
                assert abs(out[-1] - expected) < 1e-10

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_last_row_is_conjugated_weights(self, rng, backend):
        for n in (1, 2, 3):
            w = random_phases(rng, 1 << n)
            row = dense_unitary(build_weight_operator(w, backend))[-1]
            want = np.conj(np.exp(1j * w)) / np.sqrt(1 << n)
            a, b = phase_aligned(row, want)
            np.testing.assert_allclose(a, b, atol=1e-12)


class TestHSGS:
    def test_constant_phases_give_empty_circuit(self):
        assert len(hsgs_phase_stage([1.3] * 8)) == 0

    @pytest.mark.parametrize("sign", [1, -1])
    def test_single_phase_n2(self, sign):
        circ = hsgs_phase_stage([0, np.pi, 0, 0], sign)
        # u1 on qubit 0 (index 1), then the c-u1 cancelling the phase it induced on |11>
        assert [(g.kind, g.target, g.controls) for g in circ.gates] == [("P", 0, ()), ("P", 1, (0,))]
        assert circ.gates[0].angle == pytest.approx(np.pi)
        out = run_circuit(circ, uniform(2)).amplitudes
        np.testing.assert_allclose(out, 0.5 * np.exp(1j * sign * np.array([0, np.pi, 0, 0])), atol=1e-12)

    def test_parity_order(self, rng):
        circ = hsgs_phase_stage(random_phases(rng, 16))
        arities = [len(g.controls) for g in circ.gates]
        assert arities == sorted(arities)

    def test_corrections_reconstruct_diagonal(self, rng):
        # oracle: brute-force sum over all subsets contained in each index
        for n in (1, 2, 3, 4):
            pv = PhaseVector(random_phases(rng, 1 << n))
            theta = hsgs_corrections(pv)
            for j in range(1 << n):
                total = sum(t for s, t in theta.items() if s & j == s)
                assert total == pytest.approx(pv.phases[j] - pv.phases[0], abs=1e-12)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_matches_rotation_blocks_n3(self, rng, sign):
        for _ in range(20):
            xs = random_phases(rng, 8)
            rot = Circuit(3, [h(q) for q in range(3)])
            for j in range(8):
                rot.extend(rotation_block(3, j, sign * xs[j]).gates)
            hs = Circuit(3, [h(q) for q in range(3)]).extend(hsgs_phase_stage(xs, sign).gates)
            a, b = phase_aligned(run_circuit(hs).amplitudes, run_circuit(rot).amplitudes)
            np.testing.assert_allclose(a, b, atol=1e-9)

    def test_sign_validated(self):
        with pytest.raises(ValueError):
            hsgs_phase_stage([0, 1], 2)


class TestNeuronCircuit:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_equal_vectors_fire(self, rng, backend):
        for n in (1, 2, 3):
            xs = random_phases(rng, 1 << n)
            assert ancilla_probability(xs, xs, backend) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_cancelling_phases(self, backend):
        assert ancilla_probability([0, np.pi, 0, np.pi], [0, 0, 0, 0], backend) == pytest.approx(0, abs=1e-15)

    def test_register_state_after_uw_ui(self, rng):
        xs = random_phases(rng, 4)
        circ = Circuit(2).extend(build_input_operator(xs).gates).extend(build_weight_operator(xs).gates)
        assert probability_of_basis_state(run_circuit(circ), 3) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_against_cosine_sum(self, rng, backend):
        for _ in range(60):
            n = int(rng.integers(1, 4))
            xs, w = random_phases(rng, 1 << n), random_phases(rng, 1 << n)
            alpha = xs - w
            cos_sum = np.cos(alpha[:, None] - alpha[None, :]).sum() / (1 << n) ** 2
            assert ancilla_probability(xs, w, backend) == pytest.approx(cos_sum, abs=1e-9)
            assert abs(direct_inner(xs, w)) ** 2 == pytest.approx(cos_sum, abs=1e-12)

    def test_layout(self):
        circ = build_neuron_circuit([0, 1, 2, 3], [0, 0, 0, 0])
        assert circ.num_qubits == 3
        last = circ.gates[-1]
        assert (last.kind, last.target, last.controls) == ("MCX", 2, (0, 1))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            build_neuron_circuit([0, 1], [0, 1, 2, 3])


class TestBinary:
    def test_mapping(self):
        np.testing.assert_array_equal(binary_specialize([1, 1, 1, 1]).phases, [0, 0, 0, 0])
        np.testing.assert_allclose(binary_specialize([1, -1, 1, -1]).phases, [0, np.pi, 0, np.pi])

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            binary_specialize([1, 0, -1, 1])

    def test_table_matches_classical_dot_product(self):
        patterns = [np.array(p) for p in itertools.product((1, -1), repeat=4)]
        pvs = [binary_specialize(p) for p in patterns]
        assert len(set(pvs)) == 16
        for a, pa in zip(patterns, pvs):
            for b, pb in zip(patterns, pvs):
                classical = (np.dot(a, b) / 4) ** 2
                assert ancilla_probability(pa, pb, Backend.HSGS) == pytest.approx(classical, abs=1e-10)


class TestGateCost:
    def test_empty(self):
        r = gate_cost(Circuit(2))
        assert (r.total_gates, r.multi_controlled_count, r.max_control_arity) == (0, 0, 0)

    def test_rotation_counts(self):
        circ = build_input_operator([0.1, 0.2, 0.3, 0.4], Backend.ROTATION)
        r = gate_cost(circ)
        assert r.multi_controlled_count == 4
        assert r.max_control_arity == 1
        # 2 H + blocks: j=0 has 4 X, j=1 and j=2 have 2 X each, plus 4 phase gates
        assert r.total_gates == 2 + 8 + 4

    def test_hsgs_never_worse_on_random_inputs(self, rng):
        for n in (2, 3, 4):
            for _ in range(100):
                xs = random_phases(rng, 1 << n)
                hs = gate_cost(build_input_operator(xs, Backend.HSGS))
                rot = gate_cost(build_input_operator(xs, Backend.ROTATION))
                assert hs.multi_controlled_count <= rot.multi_controlled_count
                assert hs.multi_controlled_count <= (1 << n) - n - 1


class TestTextFormat:
    def test_round_trip(self, rng):
        circ = build_neuron_circuit(random_phases(rng, 8), random_phases(rng, 8), Backend.ROTATION)
        text = format_circuit(circ)
        back = parse_circuit(text)
        assert back.num_qubits == circ.num_qubits
        assert back.gates == circ.gates

    def test_line_shape(self):
        circ = build_neuron_circuit([0, np.pi, 0, 0], [0, 0, 0, 0], Backend.HSGS)
        lines = format_circuit(circ).splitlines()
        assert lines[0] == "# qubits: 3"
        assert "P 0 3.141592653589793" in lines
        assert "P 1 [0] 3.141592653589793" in lines
        assert lines[-1] == "MCX 2 [0,1]"

    def test_parse_error(self):
        with pytest.raises(ValueError):
            parse_circuit("H zero\n")
