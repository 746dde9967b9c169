import numpy as np
import pytest

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import PARAMETRIC, GateKind, cx, gate_matrix, h, rx, ry, rz, s, t
from nisqkit.circuits.pauli import Observable, all_pauli_words, parse_observable, pauli_word_matrix
from nisqkit.core.errors import FitError, InputError, NumericalError, RankDeficiencyError
from nisqkit.models.mitigation import NoisyExpectation
from nisqkit.models.noise import ChannelSpec, NoiseModel
from nisqkit.noise.channels import bit_flip, depolarizing, pauli_transfer_matrix, two_qubit_depolarizing, unitary_channel
from nisqkit.noise.density import run_density
from nisqkit.simulators.statevector import simulate
from nisqkit.mitigation.cdr import cdr_apply, cdr_fit, cdr_mitigate, near_clifford_circuits
from nisqkit.mitigation.distillation import vd_estimate
from nisqkit.mitigation.pec import apply_decomposition, pec_decompose, pec_estimate, unmitigated_estimate
from nisqkit.mitigation.readout import ResponseMatrix, mem_calibrate, mem_invert, mem_tpn
from nisqkit.mitigation.scaling import scale_noise_identity_insertion
from nisqkit.mitigation.subspace import project_sector, qse_solve, symmetry_expand
from nisqkit.mitigation.twirling import averaged_ptm, pauli_twirl, twirl_frames
from nisqkit.mitigation.zne import (
    richardson_coefficients,
    zne_exponential,
    zne_least_squares,
    zne_polyexp,
    zne_richardson,
)

BELL = Circuit(2, (h(0), cx(0, 1)))


def diag_state(*probs):
    return np.diag(np.asarray(probs, dtype=complex))


class TestRichardson:
    def test_two_points(self):
        result = zne_richardson([(1, 0.9), (2, 0.8)])
        assert result.gammas == pytest.approx([2, -1])
        assert result.estimate == pytest.approx(1.0)
        assert result.variance_amplification == pytest.approx(5)

    def test_quadratic_data(self):
        points = [(lam, 1 - 0.1 * lam + 0.01 * lam**2) for lam in (1, 2, 3)]
        result = zne_richardson(points)
        assert result.gammas == pytest.approx([3, -3, 1])
        assert result.estimate == pytest.approx(1.0, abs=1e-10)

    def test_single_point(self):
        result = zne_richardson([NoisyExpectation(value=0.7, scale=1.0)])
        assert result.gammas == [1.0]
        assert result.estimate == 0.7

    def test_coefficient_identities(self, rng):
        for n in range(1, 7):
            lam = rng.uniform(1, 5, n + 1)
            gammas = richardson_coefficients(lam)
            assert np.sum(gammas) == pytest.approx(1, abs=1e-10)
            for j in range(1, n + 1):
                assert abs(np.sum(gammas * lam**j)) < 1e-10 * max(1.0, np.max(np.abs(gammas * lam**j)))

    def test_exact_on_polynomials(self, rng):
        coeffs = rng.normal(size=4)
        points = [(lam, float(np.polyval(coeffs[::-1], lam))) for lam in (1.0, 1.5, 2.5, 3.0)]
        assert zne_richardson(points).estimate == pytest.approx(coeffs[0], abs=1e-8)

    def test_repeated_scales(self):
        with pytest.raises(InputError):
            zne_richardson([(1, 0.9), (1, 0.8)])


class TestExponentialFits:
    def test_unit_amplitude(self):
        assert zne_exponential((1, 0.8), (2, 0.64)) == pytest.approx(1.0)

    def test_half_amplitude(self):
        assert zne_exponential((1, 0.5 * np.exp(-1)), (2, 0.5 * np.exp(-2))) == pytest.approx(0.5)

    def test_non_integer_ratio(self):
        a, f = 0.7, 0.3
        first, second = (1.0, a * np.exp(-f)), (2.5, a * np.exp(-2.5 * f))
        assert zne_exponential(first, second) == pytest.approx(a)

    def test_no_decay(self):
        assert zne_exponential((1, 0.42), (3, 0.42)) == pytest.approx(0.42)

    def test_negative_values(self):
        assert zne_exponential((1, -0.8), (2, -0.64)) == pytest.approx(-1.0)

    def test_sign_change_rejected(self):
        with pytest.raises(InputError):
            zne_exponential((1, 0.1), (2, -0.1))

    def test_polyexp_matches_two_point(self):
        points = [(lam, 0.5 * np.exp(-0.3 * lam)) for lam in (1, 2, 3)]
        assert zne_polyexp(points, 1) == pytest.approx(zne_exponential(points[0], points[1]), abs=1e-8)

    def test_polyexp_constant(self):
        assert zne_polyexp([(1, 0.3), (2, 0.3), (3, 0.3)], 2) == pytest.approx(0.3)

    def test_polyexp_quadratic_exponent(self):
        points = [(lam, 0.9 * np.exp(-(0.1 * lam + 0.02 * lam**2))) for lam in range(1, 6)]
        assert zne_polyexp(points, 2) == pytest.approx(0.9, abs=1e-6)

    def test_polyexp_needs_points(self):
        with pytest.raises(FitError):
            zne_polyexp([(1, 0.5), (2, 0.4)], 2)


class TestLeastSquares:
    def test_matches_richardson(self):
        points = [(lam, 1 - 0.1 * lam + 0.01 * lam**2) for lam in (1, 2, 3)]
        lsq = zne_least_squares([([lam], v) for lam, v in points], 2)
        assert lsq.estimate == pytest.approx(zne_richardson(points).estimate, abs=1e-8)

    def test_constant(self):
        lsq = zne_least_squares([([lam], 0.25) for lam in (1, 2, 3, 4)], 2)
        assert lsq.estimate == pytest.approx(0.25, abs=1e-10)

    def test_two_parameters(self):
        points = [
            NoisyExpectation(value=1 - 0.2 * g - 0.1 * z + 0.05 * g * z, scale=[g, z])
            for g in (1.0, 2.0, 3.0)
            for z in (1.0, 2.0, 3.0)
        ]
        lsq = zne_least_squares(points, 2)
        assert lsq.estimate == pytest.approx(1.0, abs=1e-8)
        assert lsq.exponents[0] == (0, 0)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficiencyError):
            zne_least_squares([([1.0], 0.9), ([2.0], 0.8)], 2)


class TestNoiseScaling:
    def test_factor_one(self):
        assert scale_noise_identity_insertion(BELL, 1) == BELL

    def test_factor_three(self):
        scaled = scale_noise_identity_insertion(Circuit(2, (cx(0, 1),)), 3)
        assert scaled.count(2) == 3
        assert np.allclose(scaled.unitary(), gate_matrix(cx(0, 1)))

    def test_more_noise(self):
        noise = NoiseModel(channels={"cx": [ChannelSpec(kind="depolarizing", p=0.05)]})
        circuit = Circuit(2, (cx(0, 1),))
        obs = Observable.single("ZI")
        base = run_density(circuit, noise).expectation(obs)
        amplified = run_density(scale_noise_identity_insertion(circuit, 3), noise).expectation(obs)
        assert abs(amplified) < abs(base)

    def test_even_factor(self):
        with pytest.raises(InputError):
            scale_noise_identity_insertion(BELL, 2)


class TestPEC:
    def test_bit_flip_decomposition(self):
        decomposition = pec_decompose(bit_flip(0.1))
        assert decomposition.coefficients["I"] == pytest.approx(1.125)
        assert decomposition.coefficients["X"] == pytest.approx(-0.125)
        assert decomposition.overhead == pytest.approx(1.25)
        assert decomposition.sampling_overhead == pytest.approx(1.5625)

    def test_zero_rate(self):
        decomposition = pec_decompose(bit_flip(0.0))
        assert decomposition.coefficients["I"] == pytest.approx(1)
        assert decomposition.overhead == pytest.approx(1)

    def test_depolarizing_symmetry(self):
        q = pec_decompose(depolarizing(0.07)).coefficients
        assert q["X"] == pytest.approx(q["Y"]) == pytest.approx(q["Z"])

    @pytest.mark.parametrize("channel", [bit_flip(0.1), depolarizing(0.2), two_qubit_depolarizing(0.05)])
    def test_composition_is_identity(self, channel):
        decomposition = pec_decompose(channel)
        for word in all_pauli_words(channel.arity):
            p = pauli_word_matrix(word)
            assert np.allclose(apply_decomposition(decomposition, channel.apply(p)), p, atol=1e-10)

    def test_fully_depolarizing_is_singular(self):
        with pytest.raises(RankDeficiencyError):
            pec_decompose(bit_flip(0.5))

    def test_noiseless_matches_exact(self, rng):
        obs = Observable.single("ZZ")
        result = pec_estimate(BELL, NoiseModel(), obs, 100, rng)
        assert result.estimate == pytest.approx(1.0)
        assert result.overhead == 1.0

    def test_removes_bias(self, rng):
        noise = NoiseModel(channels={"1q": [ChannelSpec(kind="bit_flip", p=0.05)], "2q": [ChannelSpec(kind="bit_flip", p=0.05)]})
        obs = Observable.single("ZZ")
        ideal = simulate(BELL).expectation(obs)
        raw = run_density(BELL, noise).expectation(obs)
        result = pec_estimate(BELL, noise, obs, 100_000, rng)
        assert abs(result.estimate - ideal) < 4 * result.stderr
        assert abs(result.estimate - ideal) < abs(raw - ideal) / 5
        assert result.overhead == pytest.approx((1 / 0.9) ** 3)

    def test_variance_grows_with_overhead(self, rng):
        noise = NoiseModel(channels={"2q": [ChannelSpec(kind="bit_flip", p=0.1)]})
        obs = Observable.single("ZZ")
        plain = unmitigated_estimate(BELL, noise, obs, 20_000, rng)
        mitigated = pec_estimate(BELL, noise, obs, 20_000, rng)
        assert plain.overhead == 1.0
        assert mitigated.stderr > plain.stderr

    def test_decomposition_count_checked(self, rng):
        noise = NoiseModel(channels={"2q": [ChannelSpec(kind="bit_flip", p=0.1)]})
        with pytest.raises(InputError):
            pec_estimate(BELL, noise, Observable.single("ZZ"), 10, rng, decompositions=[pec_decompose(bit_flip(0.1))])


class TestReadoutMitigation:
    LAMBDA = np.array([[0.9, 0.2], [0.1, 0.8]])

    def test_exact_inversion(self):
        result = mem_invert(self.LAMBDA, [0.9, 0.1])
        assert result.probabilities == pytest.approx([1, 0])
        assert not result.clipped

    def test_identity(self):
        result = mem_invert(np.eye(2), [0.3, 0.7])
        assert result.probabilities == pytest.approx([0.3, 0.7])

    def test_clipping(self):
        result = mem_invert(self.LAMBDA, [1.0, 0.0])
        assert result.raw == pytest.approx([1.1429, -0.1429], abs=1e-4)
        assert result.probabilities == pytest.approx([1, 0])
        assert result.clipped

    def test_calibrate_noiseless(self):
        assert np.allclose(mem_calibrate(None, 2).dense(), np.eye(4))

    def test_calibrate_symmetric_flip(self):
        response = mem_calibrate(NoiseModel(readout={0: (0.1, 0.1)}), 1)
        assert np.allclose(response.dense(), [[0.9, 0.1], [0.1, 0.9]])

    def test_calibrate_product(self):
        noise = NoiseModel(readout={0: (0.05, 0.1), 1: (0.02, 0.03)})
        response = mem_calibrate(noise, 2)
        assert np.allclose(response.dense(), mem_tpn([(0.05, 0.1), (0.02, 0.03)]).dense())

    def test_sampled_calibration(self, rng):
        response = mem_calibrate(NoiseModel(readout={0: (0.1, 0.2)}), 1, "samples", 20_000, rng)
        assert np.allclose(response.dense(), [[0.9, 0.2], [0.1, 0.8]], atol=0.02)

    def test_tpn_factored_action(self, rng):
        response = mem_tpn([(0.0, 0.0), (0.0, 0.0)])
        p = rng.dirichlet(np.ones(4))
        assert np.allclose(response.apply(p), p)
        response = mem_tpn([(0.05, 0.1), (0.2, 0.03)])
        assert np.allclose(response.apply(p), response.dense() @ p)
        assert np.allclose(response.solve(response.apply(p)), p, atol=1e-10)

    def test_invert_undoes_response(self, rng):
        response = mem_tpn([(0.05, 0.1), (0.08, 0.02), (0.01, 0.04)])
        assert response.condition_number() < 100
        for _ in range(5):
            p = rng.dirichlet(np.ones(8))
            result = mem_invert(response, response.apply(p))
            assert np.allclose(result.probabilities, p, atol=1e-10)

    def test_singular(self):
        with pytest.raises(RankDeficiencyError):
            mem_invert(np.array([[0.5, 0.5], [0.5, 0.5]]), [0.5, 0.5])

    def test_invalid_matrix(self):
        with pytest.raises(InputError):
            ResponseMatrix(matrix=np.array([[0.9, 0.2], [0.2, 0.9]]))


class TestVirtualDistillation:
    def test_diagonal_mixture(self):
        rho = diag_state(0.9, 0.1)
        z = Observable.single("Z")
        assert vd_estimate(rho, z, 1) == pytest.approx(0.8)
        assert vd_estimate(rho, z, 2) == pytest.approx(0.8 / 0.82)

    def test_bias_decreases_with_copies(self):
        rho = diag_state(0.85, 0.15)
        z = Observable.single("Z")
        biases = [abs(vd_estimate(rho, z, m) - 1) for m in range(1, 5)]
        assert all(a > b for a, b in zip(biases, biases[1:]))

    def test_pure_state_unchanged(self, rng):
        psi = simulate(Circuit(2, (ry(0.7, 0), cx(0, 1), rx(0.3, 1)))).amplitudes
        rho = np.outer(psi, psi.conj())
        obs = parse_observable("0.5 XZ\n1.0 ZZ\n")
        raw = np.trace(rho @ obs.to_matrix()).real
        for m in range(1, 5):
            assert vd_estimate(rho, obs, m) == pytest.approx(raw, abs=1e-10)

    def test_invalid_copies(self):
        with pytest.raises(InputError):
            vd_estimate(diag_state(1, 0), Observable.single("Z"), 0)


class TestSymmetry:
    RHO = 0.8 * np.diag([0, 1, 0, 0]).astype(complex) + 0.2 * np.diag([1, 0, 0, 0]).astype(complex)

    def test_projection(self):
        obs = Observable.single("IZ")
        assert np.trace(self.RHO @ obs.to_matrix()).real == pytest.approx(-0.6)
        result = symmetry_expand(self.RHO, obs, "ZZ", -1)
        assert result.estimate == pytest.approx(-1)
        assert result.sector_weight == pytest.approx(0.8)
        assert result.overhead == pytest.approx(1.25)

    def test_state_in_sector(self):
        rho = diag_state(0, 0.3, 0.7, 0)
        obs = Observable.single("ZI")
        assert symmetry_expand(rho, obs, "ZZ", -1).estimate == pytest.approx(np.trace(rho @ obs.to_matrix()).real)

    def test_idempotent(self, rng):
        psi = simulate(Circuit(2, (h(0), ry(0.4, 1), cx(0, 1)))).amplitudes
        rho = 0.7 * np.outer(psi, psi.conj()) + 0.3 * np.eye(4) / 4
        obs = Observable.from_terms([(1.0, "ZI"), (0.5, "XX")])
        once = project_sector(rho, "ZZ", 1)
        assert symmetry_expand(once, obs, "ZZ", 1).estimate == pytest.approx(symmetry_expand(rho, obs, "ZZ", 1).estimate)

    def test_anticommuting_observable(self):
        with pytest.raises(InputError):
            symmetry_expand(self.RHO, Observable.single("XI"), "ZZ", 1)

    def test_empty_sector(self):
        with pytest.raises(NumericalError):
            symmetry_expand(diag_state(1, 0, 0, 0), Observable.single("ZZ"), "ZZ", -1)


class TestSubspaceExpansion:
    H = parse_observable("1.0 Z\n0.5 X\n")

    def ground(self):
        w, v = np.linalg.eigh(self.H.to_matrix())
        return w[0], v[:, 0]

    def test_ground_state(self):
        energy, psi = self.ground()
        result = qse_solve(np.outer(psi, psi.conj()), self.H, ["I"])
        assert result.energy == pytest.approx(energy, abs=1e-10)
        assert result.rank == 1

    def test_perturbed_state_improves(self):
        energy, psi = self.ground()
        u = gate_matrix(ry(0.3, 0))
        phi = u @ psi
        rho = np.outer(phi, phi.conj())
        raw = np.trace(rho @ self.H.to_matrix()).real
        result = qse_solve(rho, self.H, ["I", "X"])
        assert abs(result.energy - energy) < abs(raw - energy)

    def test_full_basis_is_exact(self):
        energy, _ = self.ground()
        rho = np.array([[0.6, 0.1], [0.1, 0.4]], dtype=complex)
        assert qse_solve(rho, self.H, ["I", "X", "Y", "Z"]).energy == pytest.approx(energy, abs=1e-10)

    def test_nested_expansions_monotone(self):
        noise = NoiseModel(channels={"1q": [ChannelSpec(kind="depolarizing", p=0.05)], "2q": [ChannelSpec(kind="two_qubit_depolarizing", p=0.05)]})
        circuit = Circuit(2, (ry(0.8, 0), cx(0, 1), ry(-0.4, 1)))
        hamiltonian = parse_observable("1.0 ZZ\n0.4 XI\n0.4 IX\n")
        state = run_density(circuit, noise)
        words = ["II", "XI", "IX", "ZI", "IZ", "XX"]
        energies = [qse_solve(state, hamiltonian, words[:k]).energy for k in range(1, len(words) + 1)]
        assert all(b <= a + 1e-9 for a, b in zip(energies, energies[1:]))

    def test_identity_required(self):
        with pytest.raises(InputError):
            qse_solve(diag_state(1, 0), self.H, ["X"])


class TestCDR:
    def test_linear_pairs(self):
        model = cdr_fit([(0.5, 0.9), (0.25, 0.45), (0.1, 0.18)])
        assert model.slope == pytest.approx(1.8)
        assert model.intercept == pytest.approx(0, abs=1e-12)
        assert cdr_apply(model, 0.4) == pytest.approx(0.72)

    def test_identical_pairs(self):
        model = cdr_fit([(0.1, 0.1), (0.5, 0.5), (-0.3, -0.3)])
        assert model.slope == pytest.approx(1)
        assert model.intercept == pytest.approx(0, abs=1e-12)

    def test_degenerate_training(self):
        with pytest.raises(FitError):
            cdr_fit([(0.5, 0.9), (0.5, 0.8)])

    def test_training_circuits_are_clifford(self, rng):
        circuit = Circuit(2, (rx(0.7, 0), t(1), cx(0, 1), rz(1.9, 1), s(0)))
        for trained in near_clifford_circuits(circuit, 10, rng):
            assert GateKind.T not in trained.kinds()
            for op in trained.ops:
                if op.kind in PARAMETRIC:
                    assert np.isclose(op.angle() / (np.pi / 2), round(op.angle() / (np.pi / 2)))

    def test_global_depolarizing_is_inverted(self, rng):
        p = 0.2
        noise = NoiseModel(global_depolarizing=p)
        circuit = Circuit(2, (rx(0.7, 0), ry(1.3, 1), cx(0, 1), rz(0.4, 1), ry(0.9, 0), rx(2.1, 1)))
        obs = Observable.single("ZZ")
        result = cdr_mitigate(circuit, noise, obs, rng, n_training=20)
        assert result.model.slope == pytest.approx(1 / (1 - p), rel=1e-6)
        ideal = simulate(circuit).expectation(obs)
        assert result.estimate == pytest.approx(ideal, abs=0.02 * max(abs(ideal), 1e-3) + 1e-9)


class TestTwirling:
    def test_frames_preserve_gate(self):
        frames = twirl_frames(cx(0, 1))
        assert len(frames) == 16
        g = gate_matrix(cx(0, 1))
        for before, after in frames:
            product = pauli_word_matrix(after) @ g @ pauli_word_matrix(before)
            phase = np.vdot(g.reshape(-1), product.reshape(-1)) / 4
            assert abs(abs(phase) - 1) < 1e-12
            assert np.allclose(product, phase * g)

    def test_noiseless_equivalence(self, rng):
        circuit = Circuit(3, (h(0), cx(0, 1), rz(0.3, 1), cx(1, 2), s(2), cx(2, 0)))
        psi = simulate(circuit).amplitudes
        for merge in (False, True):
            twirled = pauli_twirl(circuit, rng, merge=merge)
            assert abs(abs(np.vdot(psi, simulate(twirled).amplitudes)) - 1) < 1e-10

    def test_single_qubit_circuit_untouched(self, rng):
        circuit = Circuit(2, (h(0), rz(0.2, 1)))
        assert pauli_twirl(circuit, rng, merge=False) == circuit

    def test_coherent_error_becomes_pauli(self, rng):
        error = np.kron(np.eye(2), gate_matrix(rz(0.2, 0)))
        channel = unitary_channel(error)
        exact = averaged_ptm(channel)
        assert np.allclose(exact, np.diag(np.diag(exact)), atol=1e-12)
        assert np.max(np.abs(pauli_transfer_matrix(channel) - np.diag(np.diag(pauli_transfer_matrix(channel))))) > 0.1
        sampled = averaged_ptm(channel, rng, samples=2000)
        assert np.max(np.abs(sampled - np.diag(np.diag(sampled)))) < 0.02

    def test_twirled_circuits_tailor_coherent_error(self):
        class CyclingFrames:
            def __init__(self):
                self.drawn = 0

            def integers(self, high):
                self.drawn += 1
                return (self.drawn - 1) % high

        def off_diagonal(ptm):
            return np.max(np.abs(ptm - np.diag(np.diag(ptm))))

        circuit = Circuit(2, (cx(0, 1),))
        ideal = circuit.unitary()
        frames = CyclingFrames()
        ptms = []
        for _ in range(200):
            twirled = pauli_twirl(circuit, frames, merge=False)
            ops = []
            for op in twirled.ops:
                ops.append(op)
                if op.kind is GateKind.CX:
                    ops.append(rz(0.2, op.targets[1]))
            noisy = twirled.with_ops(ops).unitary()
            ptms.append(pauli_transfer_matrix(unitary_channel(ideal.conj().T @ noisy)))
        bare = circuit.extend([rz(0.2, 1)]).unitary()
        assert off_diagonal(pauli_transfer_matrix(unitary_channel(ideal.conj().T @ bare))) > 0.1
        assert off_diagonal(np.mean(ptms, axis=0)) < 0.02
