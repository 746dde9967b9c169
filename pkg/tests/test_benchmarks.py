import numpy as np
import pytest

from nisqkit.benchmarks.clifford import (
    GROUP_SIZES,
    CliffordGroup,
    clifford_group,
    clifford_inverse,
    clifford_sample,
)
from nisqkit.benchmarks.fitting import average_error_rate, fit_exponential_decay
from nisqkit.benchmarks.mirror import mirror_circuit, mirror_run, polarization, random_clifford_circuit
from nisqkit.benchmarks.quantum_volume import (
    average_gate_fidelity,
    haar_su4,
    heavy_outputs,
    qv_circuit,
    qv_run,
)
from nisqkit.benchmarks.rb import rb_run, rb_sequence, survival_probability
from nisqkit.benchmarks.rqc import grid_pattern, linear_xeb_fidelity, rqc_generate
from nisqkit.benchmarks.xeb import GATE_SET, xeb_alpha, xeb_run
from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import GateKind, cx, h, t
from nisqkit.core.errors import InputError, NonCliffordError, NumericalError
from nisqkit.models.benchmark import RBConfig, XEBConfig
from nisqkit.models.noise import ChannelSpec, NoiseModel
from nisqkit.models.report import BenchmarkRequest
from nisqkit.services.benchmark_service import BenchmarkService
from nisqkit.simulators.statevector import bits_to_index, index_to_bits, output_distribution


def global_noise(key: str, p: float) -> NoiseModel:
    return NoiseModel(channels={key: [ChannelSpec(kind="global_depolarizing", p=p)]})


def proportional_to_identity(u: np.ndarray) -> bool:
    d = u.shape[0]
    return abs(abs(np.trace(u)) - d) < 1e-9


class TestClifford:
    @pytest.mark.parametrize("n", [1, 2])
    def test_group_size(self, n):
        assert len(clifford_group(n)) == GROUP_SIZES[n]

    def test_enumeration_mismatch_is_numerical(self, monkeypatch):
        monkeypatch.setitem(GROUP_SIZES, 1, 25)
        with pytest.raises(NumericalError) as info:
            CliffordGroup(1)
        assert info.value.exit_code == 1

    def test_three_qubits_rejected(self):
        with pytest.raises(InputError):
            clifford_group(3)

    @pytest.mark.parametrize("n", [1, 2])
    def test_word_times_inverse_is_identity(self, n, rng):
        for _ in range(20):
            word = clifford_sample(n, rng)
            full = Circuit(n, tuple(word) + tuple(clifford_inverse(word, n)))
            assert proportional_to_identity(full.unitary())

    def test_sampler_covers_group(self, rng):
        group = clifford_group(1)
        seen = {group.sample(rng) for _ in range(2000)}
        assert seen == set(range(24))

    def test_raw_gate_matches_word(self):
        group = clifford_group(1)
        for element in range(len(group)):
            gate = group.as_gate(element)
            assert gate.kind is GateKind.RAW
            assert np.allclose(gate.matrix, Circuit(1, group.words[element]).unitary())


class TestDecayFit:
    def test_exact_recovery(self):
        points = [(m, 0.5 * 0.9**m + 0.5) for m in range(1, 31)]
        fit = fit_exponential_decay(points)
        assert fit.p == pytest.approx(0.9, abs=1e-6)
        assert fit.a == pytest.approx(0.5, abs=1e-6)
        assert fit.b == pytest.approx(0.5, abs=1e-6)
        assert fit.flags == []

    def test_constant_data_flagged(self):
        fit = fit_exponential_decay([(1, 0.7), (2, 0.7), (4, 0.7)])
        assert fit.p == 1.0
        assert fit.a == 0.0
        assert "p unidentifiable" in fit.flags

    def test_noisy_data(self, rng):
        m = np.arange(1, 100, 3)
        y = 0.5 * 0.95**m + 0.5 + rng.normal(0, 0.005, len(m))
        fit = fit_exponential_decay(list(zip(m, y)))
        assert fit.p == pytest.approx(0.95, rel=0.02)

    def test_too_few_points(self):
        with pytest.raises(InputError):
            fit_exponential_decay([(1, 0.9), (2, 0.8)])

    def test_error_rate(self):
        assert average_error_rate(0.99, 1) == pytest.approx(0.005)
        assert average_error_rate(0.99, 2) == pytest.approx(0.0075)


class TestRB:
    def test_default_schedule(self):
        config = RBConfig(**BenchmarkService()._schedule(BenchmarkRequest(protocol="rb")))
        assert config.lengths == [2, 4, 8, 16, 32, 64, 128, 256]
        assert (config.sequences, config.shots) == (30, 1000)

    def test_sequence_inverts(self, rng):
        for compile_cliffords in (True, False):
            circuit = rb_sequence(1, 10, rng, compile_cliffords)
            assert proportional_to_identity(circuit.unitary())
        assert len(rb_sequence(1, 10, rng, True)) == 11

    def test_noiseless(self, rng):
        result = rb_run(RBConfig(lengths=[1, 2, 4, 8], sequences=5, shots=0), rng=rng, threads=1)
        assert result.fit.p == pytest.approx(1.0, abs=1e-3)
        assert result.error_rate == pytest.approx(0.0, abs=1e-3)

    def test_depolarizing_recovery(self, rng):
        config = RBConfig(lengths=[1, 2, 4, 8, 16, 32], sequences=4, shots=0)
        result = rb_run(config, global_noise("1q", 0.01), rng, threads=1)
        assert result.fit.p == pytest.approx(0.99, rel=1e-4)
        assert result.error_rate == pytest.approx(0.005, rel=0.1)

    def test_compiled_clifford_key(self, rng):
        config = RBConfig(lengths=[1, 2, 4, 8, 16], sequences=3, shots=0)
        result = rb_run(config, global_noise("unitary", 0.01), rng, threads=1)
        assert result.error_rate == pytest.approx(0.005, rel=0.1)

    def test_readout_bias_moves_offsets_not_decay(self, rng):
        config = RBConfig(lengths=[1, 2, 4, 8, 16, 32], sequences=4, shots=0)
        clean = rb_run(config, global_noise("1q", 0.01), np.random.default_rng(1), threads=1)
        biased_noise = global_noise("1q", 0.01).model_copy(update={"readout": {0: (0.0, 0.05)}})
        biased = rb_run(config, biased_noise, np.random.default_rng(1), threads=1)
        assert biased.fit.p == pytest.approx(clean.fit.p, rel=0.01)
        assert biased.fit.b != pytest.approx(clean.fit.b, abs=1e-3)

    def test_two_qubit(self, rng):
        config = RBConfig(n_qubits=2, lengths=[1, 2, 4, 8], sequences=2, shots=0)
        result = rb_run(config, global_noise("2q", 0.02), rng, threads=1)
        assert result.fit.p == pytest.approx(0.98, rel=1e-3)
        assert result.error_rate == pytest.approx(0.015, rel=0.1)

    def test_survival_with_shots(self, rng):
        circuit = rb_sequence(1, 4, rng)
        assert survival_probability(circuit, NoiseModel(), 100, rng) == 1.0


class TestXEB:
    def test_default_schedule(self):
        config = XEBConfig(**BenchmarkService()._schedule(BenchmarkRequest(protocol="xeb")))
        assert config.lengths == [2, 4, 8, 16, 32, 64, 128, 256]
        assert (config.sequences, config.shots) == (30, 1000)
        assert XEBConfig(**BenchmarkService()._schedule(BenchmarkRequest(protocol="xeb", shots=0))).shots == 0

    def test_gate_set_is_unitary(self):
        assert len(GATE_SET) == 8
        for u in GATE_SET:
            assert np.allclose(u.conj().T @ u, np.eye(2))

    def test_alpha_of_mixture(self):
        ideal = np.array([0.7, 0.2, 0.05, 0.05])
        uniform = np.full(4, 0.25)
        assert xeb_alpha(ideal, ideal) == pytest.approx(1.0)
        assert xeb_alpha(uniform, ideal) == pytest.approx(0.0, abs=1e-12)
        assert xeb_alpha(0.3 * ideal + 0.7 * uniform, ideal) == pytest.approx(0.3)
        assert xeb_alpha(ideal, uniform) is None

    def test_noiseless(self, rng):
        result = xeb_run(XEBConfig(lengths=[1, 2, 4, 8], sequences=5, shots=0), rng=rng, threads=1)
        assert all(a == pytest.approx(1.0, abs=1e-3) for _, a in result.alphas)
        assert result.fit.p == pytest.approx(1.0, abs=1e-3)

    def test_depolarizing_recovery(self, rng):
        config = XEBConfig(lengths=[1, 2, 4, 8, 16], sequences=5, shots=0)
        result = xeb_run(config, global_noise("1q", 0.01), rng, threads=1)
        assert result.fit.p == pytest.approx(0.99, rel=1e-3)
        assert result.error_rate == pytest.approx(0.005, rel=0.1)
        assert result.pauli_error == pytest.approx(result.error_rate / 2)

    def test_two_qubit_isolates_cz(self, rng):
        config = XEBConfig(n_qubits=2, lengths=[1, 2, 4, 8], sequences=4, shots=0)
        result = xeb_run(config, global_noise("cz", 0.02), rng, threads=1)
        assert result.fit.p == pytest.approx(0.98, rel=1e-3)
        assert all(fit.p == pytest.approx(1.0, abs=1e-3) for fit in result.single_qubit_fits)
        assert result.gate_decay == pytest.approx(result.fit.p, rel=1e-3)


class TestRQC:
    def test_patterns(self):
        assert grid_pattern(3, 2, "A") == [(0, 1), (3, 4)]
        assert grid_pattern(3, 2, "B") == [(1, 2), (4, 5)]
        assert grid_pattern(3, 2, "C") == [(0, 3), (1, 4), (2, 5)]
        assert grid_pattern(3, 2, "D") == []
        with pytest.raises(InputError):
            grid_pattern(3, 2, "E")

    def test_structure(self, rng):
        circuit = rqc_generate(3, 2, 8, rng)
        assert circuit.n_qubits == 6
        assert circuit.count(2) == 2 + 2 + 3 + 0 + 3 + 0 + 2 + 2
        assert circuit.count(1) == 9 * 6
        history: dict[int, list[GateKind]] = {q: [] for q in range(6)}
        for op in circuit.ops:
            if op.arity == 1:
                history[op.targets[0]].append(op.kind)
            else:
                assert op.kind is GateKind.CZ
        for kinds in history.values():
            assert all(a != b for a, b in zip(kinds, kinds[1:]))

    def test_graph_check(self, rng):
        rqc_generate(2, 2, 4, rng, CouplingGraph.grid(2, 2))
        with pytest.raises(InputError):
            rqc_generate(2, 2, 4, rng, CouplingGraph.line(4))

    def test_linear_xeb_exact(self):
        assert linear_xeb_fidelity(Circuit(1, (h(0),)), ["0", "1"]).fidelity == pytest.approx(0.0)
        bell = Circuit(2, (h(0), cx(0, 1)))
        result = linear_xeb_fidelity(bell, ["00", "11", "00"])
        assert result.fidelity == pytest.approx(1.0)
        assert result.samples == 3
        with pytest.raises(InputError):
            linear_xeb_fidelity(bell, [])

    def test_samplers(self, rng):
        circuit = rqc_generate(3, 3, 8, rng)
        n = circuit.n_qubits
        probs = output_distribution(circuit)
        ideal_value = (1 << n) * float(np.sum(probs**2)) - 1
        shots = 20000

        ideal = linear_xeb_fidelity(circuit, [index_to_bits(i, n) for i in rng.choice(1 << n, shots, p=probs)])
        assert abs(ideal.fidelity - ideal_value) < 5 * ideal.stderr

        uniform = linear_xeb_fidelity(circuit, [index_to_bits(i, n) for i in rng.integers(1 << n, size=shots)])
        assert abs(uniform.fidelity) < 5 * uniform.stderr

        f = 0.4
        mixed_probs = f * probs + (1 - f) / (1 << n)
        mixed = linear_xeb_fidelity(circuit, [index_to_bits(i, n) for i in rng.choice(1 << n, shots, p=mixed_probs)])
        assert abs(mixed.fidelity - f * ideal_value) < 5 * mixed.stderr


class TestQuantumVolume:
    def test_haar_su4(self, rng):
        traces = []
        for _ in range(2000):
            u = haar_su4(rng)
            assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)
            assert np.linalg.det(u) == pytest.approx(1.0)
            traces.append(abs(np.trace(u)) ** 2)
        assert np.mean(traces) == pytest.approx(1.0, abs=0.15)

    def test_heavy_outputs(self):
        assert heavy_outputs(np.array([0.1, 0.2, 0.3, 0.4])).tolist() == [False, False, True, True]

    def test_average_gate_fidelity(self, rng):
        u = haar_su4(rng)
        assert average_gate_fidelity(u, u) == pytest.approx(1.0)
        assert average_gate_fidelity(u, -1j * u) == pytest.approx(1.0)
        assert average_gate_fidelity(np.eye(2), np.diag([1, -1])) == pytest.approx(1 / 3)

    def test_model_circuit_shape(self, rng):
        circuit = qv_circuit(5, rng)
        assert circuit.count(2) == 5 * 2
        with pytest.raises(InputError):
            qv_circuit(1, rng)

    @pytest.mark.slow
    def test_noiseless_passes(self, rng):
        result = qv_run(4, rng=rng, circuits_per_width=20, threads=1)
        assert [w.width for w in result.widths] == [2, 3, 4]
        assert all(w.passed for w in result.widths)
        assert result.log2_volume == 4

    def test_uniform_backend_fails(self, rng):
        result = qv_run(4, NoiseModel(global_depolarizing=1.0), rng, circuits_per_width=10, threads=1)
        assert len(result.widths) == 1
        assert result.widths[0].mean_heavy_probability == pytest.approx(0.5)
        assert not result.widths[0].passed
        assert result.log2_volume == 0

    def test_routed_stays_equivalent(self, rng):
        result = qv_run(3, rng=rng, circuits_per_width=5, graph_factory=CouplingGraph.line, threads=1)
        for width in result.widths:
            assert width.max_infidelity is not None
            assert width.max_infidelity <= 1e-10
        assert result.log2_volume == 3


class TestMirror:
    def test_polarization_formula(self):
        assert polarization(0.625, 2) == pytest.approx(0.5)
        assert polarization(1.0, 3) == pytest.approx(1.0)
        assert polarization(1 / 8, 3) == pytest.approx(0.0)

    def test_noiseless(self, rng):
        base = random_clifford_circuit(3, 4, rng)
        result = mirror_run(base, rng=rng, repetitions=10, threads=1)
        assert result.polarization == pytest.approx(1.0, abs=1e-9)
        assert all(s == pytest.approx(1.0, abs=1e-9) for s in result.survivals)

    def test_global_depolarizing(self, rng):
        base = random_clifford_circuit(2, 3, rng)
        result = mirror_run(base, NoiseModel(global_depolarizing=0.2), rng, repetitions=5, threads=1)
        assert result.polarization == pytest.approx(0.8, abs=1e-9)

    def test_prediction_matches_simulation(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 5))
            base = random_clifford_circuit(n, 3, rng)
            circuit, expected = mirror_circuit(base, rng)
            probs = output_distribution(circuit)
            assert probs[bits_to_index(expected, n)] == pytest.approx(1.0, abs=1e-9)

    def test_rejects_non_clifford(self, rng):
        with pytest.raises(NonCliffordError):
            mirror_run(Circuit(1, (h(0), t(0))), rng=rng)
