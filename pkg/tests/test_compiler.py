import numpy as np
import pytest

from conftest import kron_unitary, random_circuit
from nisqkit.benchmarks.quantum_volume import average_gate_fidelity
from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import GateKind, Parameter, ccz, cx, h, rx, rz, s, sdg, t
from nisqkit.circuits.qasm import parse_circuit
from nisqkit.compiler.fusion import fuse_gates
from nisqkit.compiler.gf2 import cnot_to_matrix, gf2_matmul, gf2_rank, matrix_to_cnot, random_invertible
from nisqkit.compiler.routing import Layout, apply_layout, apply_layout_bits, route
from nisqkit.core.errors import InputError, ParameterError, QubitIndexError
from nisqkit.models.report import CompileRequest
from nisqkit.services.compile_service import CompileService


def equivalent_after_routing(circuit: Circuit, graph: CouplingGraph) -> float:
    routed = route(circuit, graph)
    logical = apply_layout(routed.circuit.unitary(), routed.final_layout)
    return average_gate_fidelity(circuit.unitary(), logical)


class TestLayout:
    def test_swapped_and_inverse(self):
        layout = Layout.identity(3).swapped(0, 1)
        assert layout.physical == (1, 0, 2)
        assert layout.inverse() == (1, 0, 2)
        assert layout.swapped(1, 2).physical == (2, 0, 1)

    def test_not_a_permutation(self):
        with pytest.raises(InputError):
            Layout((0, 0, 1))

    def test_apply_layout_bits(self):
        assert apply_layout_bits("100", Layout((1, 0, 2))) == "010"


class TestRouting:
    def test_line_needs_one_swap(self):
        routed = route(Circuit(3, (cx(0, 2),)), CouplingGraph.line(3))
        assert routed.swaps == 1
        assert [op.kind for op in routed.circuit.ops] == [GateKind.SWAP, GateKind.CX]
        assert routed.final_layout.physical == (1, 0, 2)

    def test_adjacent_gates_untouched(self):
        circuit = Circuit(3, (h(0), cx(0, 1), cx(2, 1)))
        routed = route(circuit, CouplingGraph.line(3))
        assert routed.swaps == 0
        assert routed.circuit == circuit

    def test_every_gate_on_an_edge(self, rng):
        graph = CouplingGraph.grid(3, 2)
        circuit = random_circuit(6, 40, rng, two_qubit=0.6)
        routed = route(circuit, graph)
        for op in routed.circuit.ops:
            if op.arity == 2:
                assert graph.are_adjacent(*op.targets)

    @pytest.mark.parametrize("graph", [CouplingGraph.line(5), CouplingGraph.grid(3, 2)], ids=["line", "grid"])
    def test_routing_preserves_unitary(self, graph, rng):
        for _ in range(5):
            circuit = random_circuit(graph.n_nodes, 30, rng, two_qubit=0.6)
            assert equivalent_after_routing(circuit, graph) == pytest.approx(1.0, abs=1e-10)

    def test_lookahead_preserves_unitary(self, rng):
        graph = CouplingGraph.line(4)
        circuit = random_circuit(4, 30, rng, two_qubit=0.7)
        routed = route(circuit, graph, lookahead=0.5)
        logical = apply_layout(routed.circuit.unitary(), routed.final_layout)
        assert average_gate_fidelity(circuit.unitary(), logical) == pytest.approx(1.0, abs=1e-10)

    def test_circuit_wider_than_graph(self):
        with pytest.raises(QubitIndexError):
            route(Circuit(4, (cx(0, 3),)), CouplingGraph.line(3))

    def test_three_qubit_gates_rejected(self):
        with pytest.raises(InputError):
            route(Circuit(3, (ccz(0, 1, 2),)), CouplingGraph.line(3))

    def test_narrow_circuit_on_larger_graph(self):
        routed = route(Circuit(2, (cx(0, 1),)), CouplingGraph.line(4))
        assert routed.circuit.n_qubits == 4
        assert routed.swaps == 0


class TestGF2:
    def test_cnot_matrix(self):
        circuit = Circuit(2, (cx(0, 1),))
        assert cnot_to_matrix(circuit).tolist() == [[1, 0], [1, 1]]

    def test_non_cnot_rejected(self):
        with pytest.raises(InputError):
            cnot_to_matrix(Circuit(2, (h(0),)))

    def test_rank(self):
        assert gf2_rank([[1, 1], [1, 1]]) == 1
        assert gf2_rank(np.eye(4, dtype=np.uint8)) == 4

    def test_synthesis_round_trip(self, rng):
        for n in range(2, 7):
            m = random_invertible(n, rng)
            circuit = matrix_to_cnot(m)
            assert len(circuit) <= n * n
            assert np.array_equal(cnot_to_matrix(circuit), m)

    def test_synthesized_unitary_permutes_basis(self, rng):
        m = random_invertible(3, rng)
        u = matrix_to_cnot(m).unitary()
        for index in range(8):
            x = np.array([(index >> (2 - q)) & 1 for q in range(3)])
            y = gf2_matmul(m, x.reshape(3, 1)).ravel()
            target = int("".join(str(b) for b in y), 2)
            assert abs(u[target, index]) == pytest.approx(1.0)

    def test_singular_rejected(self):
        with pytest.raises(InputError):
            matrix_to_cnot([[1, 1], [1, 1]])


class TestFusion:
    def test_runs_merge(self):
        circuit = Circuit(2, (h(0), t(0), s(1), cx(0, 1), rz(0.3, 1), rx(0.2, 1)))
        fused = fuse_gates(circuit, absorb=False)
        kinds = [op.kind for op in fused.ops]
        assert kinds == [GateKind.RAW, GateKind.S, GateKind.CX, GateKind.RAW]
        assert np.allclose(fused.unitary(), circuit.unitary())

    def test_identity_runs_vanish(self):
        fused = fuse_gates(Circuit(1, (s(0), sdg(0), h(0), h(0))))
        assert len(fused) == 0

    def test_absorb_into_two_qubit_gate(self):
        circuit = Circuit(2, (h(0), cx(0, 1)))
        fused = fuse_gates(circuit)
        assert len(fused) == 1
        assert fused.ops[0].kind is GateKind.RAW
        assert np.allclose(fused.unitary(), circuit.unitary())

    def test_preserves_unitary_and_idempotent(self, rng):
        for _ in range(5):
            circuit = random_circuit(4, 40, rng)
            once = fuse_gates(circuit)
            assert np.allclose(kron_unitary(once), kron_unitary(circuit), atol=1e-10)
            assert len(fuse_gates(once)) == len(once)

    def test_symbolic_rejected(self):
        with pytest.raises(ParameterError):
            fuse_gates(Circuit(1, (rx(Parameter(0), 0),)))


class TestCompileService:
    def test_passes_in_order(self):
        circuit = parse_circuit("qreg q[3];\nh q[0];\ncx q[0],q[2];\n")
        request = CompileRequest(circuit="", graph="line:3", passes=["route", "fuse"])
        report = CompileService().run(request, circuit)
        assert [p["pass"] for p in report["passes"]] == ["route", "fuse"]
        assert report["passes"][0]["swaps"] == 1
        assert report["final_layout"] == [1, 0, 2]
        assert "qreg q[3];" in report["circuit"]

    def test_route_needs_graph(self):
        circuit = Circuit(2, (cx(0, 1),))
        with pytest.raises(InputError):
            CompileService().run(CompileRequest(circuit="", passes=["route"]), circuit)

    def test_cnot_synthesis_pass(self):
        circuit = Circuit(3, (cx(0, 1), cx(1, 2), cx(0, 1), cx(2, 0)))
        report = CompileService().run(CompileRequest(circuit="", passes=["cnot-synth"]), circuit)
        assert report["passes"][0]["matrix"] == cnot_to_matrix(circuit).tolist()
