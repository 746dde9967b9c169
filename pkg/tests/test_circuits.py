import numpy as np
import pytest

from conftest import kron_unitary, random_circuit
from nisqkit.circuits.circuit import Circuit, inverse
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import (
    Gate,
    GateKind,
    Parameter,
    cx,
    gate_matrix,
    h,
    is_unitary,
    raw,
    rx,
    rz,
    s,
)
from nisqkit.circuits.pauli import (
    CONJUGATION_CACHE_SIZE,
    Observable,
    PauliString,
    PhasedPauli,
    all_pauli_words,
    conjugate_through,
    parse_observable,
    pauli_apply_conjugation,
    pauli_word_matrix,
    _conjugation_table,
)
from nisqkit.circuits.qasm import parse_circuit, render_circuit
from nisqkit.core.errors import (
    CircuitSyntaxError,
    InputError,
    NonCliffordError,
    ParameterError,
    QubitIndexError,
    UnknownGateError,
)
from nisqkit.vqa.ansatz import random_parametric_circuit
from nisqkit.vqa.qaoa import MaxCutProblem, qaoa_circuit


class TestGates:
    def test_rz_zero_is_identity(self):
        assert np.allclose(gate_matrix(rz(0.0, 0)), np.eye(2))

    def test_rx_pi_is_minus_i_x(self):
        assert np.allclose(gate_matrix(rx(np.pi, 0)), -1j * np.array([[0, 1], [1, 0]]))

    def test_cx_swaps_10_and_11(self):
        m = gate_matrix(cx(0, 1))
        assert np.allclose(m @ np.eye(4)[:, 2], np.eye(4)[:, 3])
        assert np.allclose(m @ np.eye(4)[:, 0], np.eye(4)[:, 0])

    def test_all_matrices_unitary(self, rng):
        for kind in GateKind:
            if kind is GateKind.RAW:
                continue
            arity = {GateKind.CX: 2, GateKind.CZ: 2, GateKind.SWAP: 2, GateKind.CCZ: 3}.get(kind, 1)
            targets = tuple(range(arity))
            angles = rng.uniform(-10, 10, 100) if kind in (GateKind.RX, GateKind.RY, GateKind.RZ) else [None]
            for angle in angles:
                assert is_unitary(gate_matrix(Gate(kind, targets, angle)))

    def test_missing_parameter_value(self):
        gate = rx(Parameter(2), 0)
        with pytest.raises(ParameterError):
            gate_matrix(gate, [0.1])

    def test_invalid_gates(self):
        with pytest.raises(InputError):
            Gate(GateKind.CX, (0, 0))
        with pytest.raises(ParameterError):
            Gate(GateKind.RX, (0,))
        with pytest.raises(InputError):
            raw(np.array([[1, 1], [0, 1]]), 0)


class TestCircuit:
    def test_parse_bell(self):
        circuit = parse_circuit("qreg q[2]; h q[0]; cx q[0],q[1];")
        assert circuit.n_qubits == 2
        assert circuit.ops == (h(0), cx(0, 1))

    def test_symbolic_slot(self):
        circuit = parse_circuit("qreg q[1]; rx(theta0) q[0];")
        assert circuit.n_params == 1
        assert circuit.param_names == ("theta0",)

    def test_slots_in_first_appearance_order(self):
        circuit = parse_circuit("qreg q[2];\nrz(b) q[0];\nrx(a) q[1];\nry(-2*b) q[0];\n")
        assert circuit.param_names == ("b", "a")
        assert circuit.ops[2].param == Parameter(0, "b", -2.0)

    def test_index_out_of_range(self):
        with pytest.raises(QubitIndexError):
            parse_circuit("qreg q[1]; cx q[0],q[1];")

    def test_unknown_gate(self):
        with pytest.raises(UnknownGateError):
            parse_circuit("qreg q[1];\nfoo q[0];")

    def test_syntax_error_location(self):
        with pytest.raises(CircuitSyntaxError) as info:
            parse_circuit("qreg q[2];\nh q[0]\ncx q[0],q[1];")
        assert info.value.line >= 2

    def test_comments_and_barrier(self):
        circuit = parse_circuit("// bell\nqreg q[2];\nh q[0]; // first\nbarrier;\ncx q[0],q[1];\n")
        assert len(circuit) == 2

    def test_render_round_trip(self, rng):
        for _ in range(20):
            circuit = random_circuit(4, 30, rng)
            circuit = circuit.extend([raw(gate_matrix(rx(0.3, 0)) @ gate_matrix(s(0)), 2)])
            assert parse_circuit(render_circuit(circuit)) == circuit

    def test_render_round_trip_symbolic(self):
        circuit = parse_circuit("qreg q[2];\nrx(theta) q[0];\nrz(-theta) q[1];\nry(0.5*phi) q[1];\n")
        assert parse_circuit(render_circuit(circuit)) == circuit

    def test_render_keeps_slot_order(self):
        circuit = qaoa_circuit(MaxCutProblem(3, ((0, 1), (1, 2), (0, 2))), 2)
        back = parse_circuit(render_circuit(circuit))
        assert back == circuit
        assert back.param_names == ("gamma0", "gamma1", "beta0", "beta1")
        theta = [0.1, 0.2, 0.3, 0.4]
        assert np.allclose(back.unitary(theta), circuit.unitary(theta))

    def test_render_round_trip_random_parametric(self, rng):
        for _ in range(5):
            circuit = random_parametric_circuit(3, 4, 30, rng)
            back = parse_circuit(render_circuit(circuit))
            assert back == circuit
            assert back.param_names == circuit.param_names

    def test_render_keeps_unused_slots(self):
        circuit = Circuit(1, (rx(Parameter(0), 0),), n_params=2)
        back = parse_circuit(render_circuit(circuit))
        assert back.n_params == 2
        assert back == circuit

    def test_param_declaration_sets_slots(self):
        circuit = parse_circuit("qreg q[1];\nparam b, a;\nrx(a) q[0];\n")
        assert circuit.n_params == 2
        assert circuit.param_names == ("b", "a")
        assert circuit.ops[0].param == Parameter(1, "a")

    @pytest.mark.parametrize(
        "text",
        [
            "param a;\nqreg q[1];\n",
            "qreg q[1];\nh q[0];\nparam a;\n",
            "qreg q[1];\nparam a, a;\n",
            "qreg q[1];\nparam pi;\n",
        ],
        ids=["before-qreg", "after-gate", "duplicate", "pi"],
    )
    def test_param_declaration_errors(self, text):
        with pytest.raises(CircuitSyntaxError):
            parse_circuit(text)

    def test_inverse_examples(self):
        assert inverse(Circuit(1, (h(0),))).ops == (h(0),)
        assert inverse(Circuit(2, (rx(0.3, 0), cx(0, 1)))).ops == (cx(0, 1), rx(-0.3, 0))

    def test_inverse_is_involution_and_undoes(self, rng):
        for _ in range(10):
            circuit = random_circuit(3, 25, rng)
            assert inverse(inverse(circuit)) == circuit
            total = kron_unitary(circuit + inverse(circuit))
            assert np.max(np.abs(total - np.eye(8))) < 1e-10

    def test_bind_requires_all_params(self):
        circuit = parse_circuit("qreg q[1]; rx(a) q[0]; rz(b) q[0];")
        with pytest.raises(ParameterError):
            circuit.bind([0.1])
        assert circuit.bind([0.1, 0.2]).is_bound


class TestPauli:
    def test_raw_conjugation_cache_is_bounded(self):
        _conjugation_table.cache_clear()
        for k in range(CONJUGATION_CACHE_SIZE + 16):
            phased_h = np.exp(1j * k * 1e-3) * gate_matrix(h(0))
            assert pauli_apply_conjugation("X", raw(phased_h, 0)) == PhasedPauli("Z")
        assert _conjugation_table.cache_info().currsize == CONJUGATION_CACHE_SIZE

    def test_textbook_conjugations(self):
        assert pauli_apply_conjugation("X", h(0)) == PhasedPauli("Z")
        assert pauli_apply_conjugation("XI", cx(0, 1)) == PhasedPauli("XX")
        assert pauli_apply_conjugation("X", s(0)) == PhasedPauli("Y")

    def test_non_clifford_rejected(self):
        with pytest.raises(NonCliffordError):
            pauli_apply_conjugation("X", Gate(GateKind.T, (0,)))

    def test_conjugation_matches_matrix_oracle(self, rng):
        from conftest import embed

        gates = [h, s, lambda q: cx(q, (q + 1) % 3), lambda q: Gate(GateKind.CZ, (q, (q + 2) % 3))]
        for _ in range(30):
            word = [gates[int(rng.integers(4))](int(rng.integers(3))) for _ in range(8)]
            p = "".join(rng.choice(list("IXYZ"), size=3))
            image = conjugate_through(p, word)
            u = np.eye(8, dtype=complex)
            for g in word:
                u = embed(gate_matrix(g), g.targets, 3) @ u
            assert abs(abs(image.phase) - 1) < 1e-12
            assert np.allclose(u @ pauli_word_matrix(p) @ u.conj().T, image.to_matrix())

    def test_product_and_commutation(self):
        assert PhasedPauli("X") * PhasedPauli("Y") == PhasedPauli("Z", 1j)
        assert PauliString("XX").commutes_with("ZZ")
        assert not PauliString("XI").commutes_with("ZI")

    def test_all_words_order(self):
        assert all_pauli_words(1) == ["I", "X", "Y", "Z"]
        assert len(all_pauli_words(3)) == 64

    def test_parse_observable(self):
        obs = parse_observable("-0.5 ZZI\n// comment\n1.0 XII\n")
        assert obs.n_qubits == 3
        assert [(t.letters, t.coefficient) for t in obs.terms] == [("ZZI", -0.5), ("XII", 1.0)]
        assert np.allclose(obs.to_matrix(), obs.to_matrix().conj().T)

    def test_observable_widths_must_match(self):
        with pytest.raises(InputError):
            Observable((PauliString("Z"), PauliString("ZZ")))


class TestCouplingGraph:
    def test_distance_table(self):
        graph = CouplingGraph.line(4)
        d = graph.distance
        assert d[0, 3] == 3
        assert np.array_equal(d, d.T)
        assert np.all(np.diag(d) == 0)

    def test_grid_edges(self):
        graph = CouplingGraph.grid(2, 2)
        assert graph.edges == ((0, 1), (0, 2), (1, 3), (2, 3))

    def test_from_text_forms(self):
        assert CouplingGraph.from_text("line:3").edges == ((0, 1), (1, 2))
        assert CouplingGraph.from_text("0-1,1-2").edges == ((0, 1), (1, 2))
        assert CouplingGraph.from_text("0 1\n1 2\n# tail\n2 3\n").n_nodes == 4

    def test_disconnected_rejected(self):
        with pytest.raises(InputError):
            CouplingGraph(4, [(0, 1), (2, 3)])
