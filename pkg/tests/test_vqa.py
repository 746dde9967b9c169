import numpy as np
import pytest

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, GateKind, Parameter, cx, h, i, rx
from nisqkit.circuits.pauli import parse_observable
from nisqkit.core.errors import BackendError, InputError, NumericalError, ParameterError
from nisqkit.models.vqa import OptimizerConfig
from nisqkit.services.vqa_service import VQAService, random_hamiltonian
from nisqkit.simulators.statevector import monitor, simulate
from nisqkit.vqa.ansatz import hardware_efficient_ansatz, random_parametric_circuit
from nisqkit.vqa.gradients import grad_adjoint, grad_fd1, grad_fd2, grad_pshift, gradient
from nisqkit.vqa.loss import LossSpec, loss
from nisqkit.vqa.optimizer import optimize
from nisqkit.vqa.qaoa import MaxCutProblem, qaoa_circuit, qaoa_maxcut

Z = parse_observable("1.0 Z")


@pytest.fixture
def rx_spec():
    return LossSpec(Circuit(1, (rx(Parameter(0), 0),)), Z)


class TestLoss:
    def test_rx_cosine(self, rx_spec):
        assert loss(rx_spec, [0.0]) == pytest.approx(1)
        assert loss(rx_spec, [np.pi]) == pytest.approx(-1)
        assert loss(rx_spec, [0.4]) == pytest.approx(np.cos(0.4))

    def test_dense_oracle(self, rng):
        circuit = hardware_efficient_ansatz(4, 2)
        hamiltonian = random_hamiltonian(4, 6, rng)
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        psi = simulate(circuit.bind(theta)).amplitudes
        expected = np.vdot(psi, hamiltonian.to_matrix() @ psi).real
        assert loss(LossSpec(circuit, hamiltonian), theta) == pytest.approx(expected, abs=1e-10)

    def test_mps_backend(self, rng):
        circuit = hardware_efficient_ansatz(4, 2)
        hamiltonian = random_hamiltonian(4, 5, rng)
        theta = rng.uniform(-1, 1, circuit.n_params)
        sv = loss(LossSpec(circuit, hamiltonian), theta)
        mps = loss(LossSpec(circuit, hamiltonian, "mps", {"truncation": 0.0}), theta)
        assert mps == pytest.approx(sv, abs=1e-9)

    def test_identity_gates_do_not_change_loss(self, rng):
        circuit = hardware_efficient_ansatz(3, 1)
        padded = circuit.extend([i(0), i(2)])
        hamiltonian = random_hamiltonian(3, 4, rng)
        theta = rng.uniform(-1, 1, circuit.n_params)
        assert loss(LossSpec(padded, hamiltonian), theta) == pytest.approx(loss(LossSpec(circuit, hamiltonian), theta))

    def test_wrong_parameter_count(self, rx_spec):
        with pytest.raises(ParameterError):
            loss(rx_spec, [0.1, 0.2])

    def test_unknown_backend(self):
        with pytest.raises(BackendError):
            LossSpec(Circuit(1, (rx(Parameter(0), 0),)), Z, backend="gpu")


class TestGradients:
    def test_forward_difference(self, rx_spec):
        assert grad_fd1(rx_spec, [np.pi / 2], 1e-5)[0] == pytest.approx(-1, abs=1e-4)

    def test_forward_difference_error_is_linear(self, rx_spec):
        exact = -np.sin(1.0)
        big = abs(grad_fd1(rx_spec, [1.0], 1e-5)[0] - exact)
        small = abs(grad_fd1(rx_spec, [1.0], 5e-6)[0] - exact)
        assert big / small == pytest.approx(2, rel=0.2)

    def test_central_difference(self, rx_spec):
        assert grad_fd2(rx_spec, [np.pi / 2], 1e-3)[0] == pytest.approx(-1, abs=1e-6)
        assert abs(grad_fd2(rx_spec, [0.0], 1e-3)[0]) < 1e-12

    def test_central_difference_error_is_quadratic(self, rx_spec):
        exact = -np.sin(1.0)
        big = abs(grad_fd2(rx_spec, [1.0], 1e-2)[0] - exact)
        small = abs(grad_fd2(rx_spec, [1.0], 2.5e-3)[0] - exact)
        assert big / small == pytest.approx(16, rel=0.1)

    def test_constant_loss(self):
        spec = LossSpec(Circuit(1, (rx(Parameter(0), 0),)), parse_observable("1.0 I"))
        assert np.allclose(grad_fd1(spec, [0.3]), 0)

    def test_parameter_shift(self, rx_spec):
        assert grad_pshift(rx_spec, [np.pi / 2])[0] == pytest.approx(-1, abs=1e-12)
        assert abs(grad_pshift(rx_spec, [0.0])[0]) < 1e-12

    def test_adjoint_closed_form(self, rx_spec):
        for theta in (0.3, 1.2, np.pi / 2, 2.9):
            assert grad_adjoint(rx_spec, [theta])[0] == pytest.approx(-np.sin(theta), abs=1e-12)

    def test_parameterless_circuit(self):
        spec = LossSpec(Circuit(2, (h(0), cx(0, 1))), parse_observable("1.0 ZZ"))
        assert grad_adjoint(spec, []).shape == (0,)

    def test_shared_and_scaled_slots(self):
        circuit = Circuit(1, (rx(Parameter(0, "a", 2.0), 0), rx(Parameter(0, "a", -1.0), 0)))
        spec = LossSpec(circuit, Z)
        # loss = cos(theta)
        assert grad_adjoint(spec, [0.8])[0] == pytest.approx(-np.sin(0.8), abs=1e-12)
        assert grad_pshift(spec, [0.8])[0] == pytest.approx(-np.sin(0.8), abs=1e-12)

    def test_cross_method_consistency(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 7))
            m = int(rng.integers(1, 25))
            circuit = random_parametric_circuit(n, m, 3 * m, rng)
            spec = LossSpec(circuit, random_hamiltonian(n, 5, rng))
            theta = rng.uniform(-np.pi, np.pi, m)
            adjoint = grad_adjoint(spec, theta)
            assert np.max(np.abs(adjoint - grad_pshift(spec, theta))) < 1e-10
            assert np.max(np.abs(adjoint - grad_fd2(spec, theta, 1e-4))) < 1e-6

    @pytest.mark.slow
    def test_large_ansatz_consistency(self, rng):
        circuit = random_parametric_circuit(8, 50, 150, rng)
        spec = LossSpec(circuit, random_hamiltonian(8, 6, rng))
        theta = rng.uniform(-np.pi, np.pi, 50)
        adjoint = grad_adjoint(spec, theta)
        assert np.max(np.abs(adjoint - grad_pshift(spec, theta))) < 1e-10
        assert np.max(np.abs(adjoint - grad_fd2(spec, theta, 1e-4))) < 1e-6

    def test_adjoint_uses_two_buffers(self, rng):
        circuit = random_parametric_circuit(6, 10, 40, rng)
        spec = LossSpec(circuit, random_hamiltonian(6, 4, rng))
        theta = rng.uniform(-1, 1, 10)
        monitor.reset_peak()
        baseline = monitor.live
        grad_adjoint(spec, theta)
        assert monitor.peak - baseline <= 2

    def test_adjoint_needs_statevector(self, rx_spec):
        spec = LossSpec(rx_spec.circuit, Z, "mps")
        with pytest.raises(BackendError):
            grad_adjoint(spec, [0.1])

    def test_unknown_method(self, rx_spec):
        with pytest.raises(InputError):
            gradient(rx_spec, [0.1], "magic")


class TestOptimizer:
    def test_converges_to_minimum(self, rx_spec):
        trace = optimize(rx_spec, [1.0], OptimizerConfig(step_size=0.1, max_iterations=200))
        assert trace.final.loss == pytest.approx(-1, abs=1e-6)
        assert trace.converged
        assert trace.iterates[0].params == [1.0]

    def test_zero_gradient_stops(self, rx_spec):
        trace = optimize(rx_spec, [0.0])
        assert len(trace.iterates) == 1
        assert trace.reason == "zero gradient"

    def test_iteration_limit(self, rx_spec):
        trace = optimize(rx_spec, [1.0], OptimizerConfig(step_size=0.01, max_iterations=3))
        assert not trace.converged
        assert trace.reason == "iteration limit"
        assert len(trace.iterates) == 4

    def test_vqe_zz(self):
        circuit = hardware_efficient_ansatz(2, 1, rotations=("ry",))
        spec = LossSpec(circuit, parse_observable("1.0 ZZ"))
        trace = optimize(spec, [0.3, 0.5], OptimizerConfig(step_size=0.2, max_iterations=500))
        assert trace.final.loss == pytest.approx(-1, abs=1e-4)

    def test_methods_agree_on_path(self, rx_spec):
        a = optimize(rx_spec, [1.0], OptimizerConfig(method="adjoint", max_iterations=20))
        b = optimize(rx_spec, [1.0], OptimizerConfig(method="pshift", max_iterations=20))
        assert a.final.params == pytest.approx(b.final.params, abs=1e-10)


class TestQAOA:
    def test_triangle(self, rng):
        problem = MaxCutProblem.from_text("0 1\n1 2\n2 0\n")
        assert problem.max_cut() == 2
        result = qaoa_maxcut(problem, 1, rng=rng, shots=200)
        assert result.expected_cut >= 1.5
        assert result.best_cut == 2
        assert result.max_cut == 2

    def test_four_cycle(self, rng):
        problem = MaxCutProblem.from_text("0 1\n1 2\n2 3\n3 0\n")
        result = qaoa_maxcut(problem, 2, rng=rng, shots=500)
        assert result.best_cut == 4
        assert result.best_bitstring in ("0101", "1010")

    def test_cost_hamiltonian(self):
        problem = MaxCutProblem(3, ((0, 1), (1, 2)))
        hc = problem.cost_hamiltonian()
        for bits, cut in (("000", 0), ("010", 2), ("011", 1)):
            state = simulate(Circuit(3, tuple(Gate(GateKind.X, (q,)) for q, b in enumerate(bits) if b == "1") or (i(0),)))
            assert state.expectation(hc) == pytest.approx(cut)

    def test_relabeling_invariance(self, rng):
        edges = ((0, 1), (1, 2), (2, 3), (0, 2))
        perm = [2, 0, 3, 1]
        relabeled = tuple((perm[a], perm[b]) for a, b in edges)
        theta = rng.uniform(0, 1, 4)
        values = []
        for graph in (edges, relabeled):
            problem = MaxCutProblem(4, graph)
            hc = problem.cost_hamiltonian()
            values.append(loss(LossSpec(qaoa_circuit(problem, 2), hc), theta))
        assert values[0] == pytest.approx(values[1], abs=1e-10)

    def test_bad_graphs(self):
        with pytest.raises(InputError):
            MaxCutProblem.from_text("0 1\n0 1\n")
        with pytest.raises(InputError):
            MaxCutProblem.from_text("0 0\n")
        with pytest.raises(InputError):
            MaxCutProblem.from_text("0 1 2\n")
        with pytest.raises(InputError):
            qaoa_circuit(MaxCutProblem(2, ((0, 1),)), 0)


class TestGradientCheck:
    def test_small_run_passes(self, rng):
        report = VQAService().gradcheck(rng, cases=5, max_qubits=3, max_params=6)
        assert report["cases"] == 5
        assert report["max_adjoint_vs_shift"] < 1e-10

    def test_disagreement_raises(self, rng, monkeypatch):
        import nisqkit.services.vqa_service as service

        monkeypatch.setattr(service, "grad_pshift", lambda spec, theta: np.full(len(theta), 99.0))
        with pytest.raises(NumericalError):
            VQAService().gradcheck(rng, cases=1, max_qubits=2, max_params=2)
