from typing import Any, Dict, List

import numpy as np
from pydantic import ValidationError

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.pauli import Observable
from nisqkit.core.errors import InputError
from nisqkit.core.logging import get_logger
from nisqkit.mitigation.cdr import cdr_mitigate
from nisqkit.mitigation.distillation import vd_estimate
from nisqkit.mitigation.pec import pec_estimate, unmitigated_estimate
from nisqkit.mitigation.readout import ResponseMatrix, mem_calibrate, mem_invert, mem_tpn
from nisqkit.mitigation.scaling import scale_noise_identity_insertion
from nisqkit.mitigation.subspace import qse_solve, symmetry_expand
from nisqkit.mitigation.zne import zne_exponential, zne_least_squares, zne_polyexp, zne_richardson
from nisqkit.models.mitigation import MitigationReport, NoisyExpectation
from nisqkit.models.noise import NoiseModel
from nisqkit.models.report import MitigateRequest
from nisqkit.noise.density import run_density
from nisqkit.utils.inputs import load_noise, require_circuit, require_observable

logger = get_logger(__name__)


def _points(data: Dict[str, Any]) -> List[NoisyExpectation]:
    try:
        return [NoisyExpectation.model_validate(p) for p in data.get("points", [])]
    except ValidationError as e:
        raise InputError(f"Error in extrapolation points: {str(e)}") from e


class MitigationService:
    """Service for applying error-mitigation methods."""

    def run(self, request: MitigateRequest, rng: np.random.Generator, threads: int) -> MitigationReport:
        """
        Apply one mitigation method.

        Args:
            request: Method and its inputs.
            rng: Generator for sampled methods.
            threads: Worker count.

        Returns:
            MitigationReport: Estimate, overhead metrics and flags.
        """
        handler = getattr(self, "_run_" + request.method.replace("-", "_"))
        report = handler(request, rng, threads)
        if report.flags:
            logger.warning(f"{request.method}: {', '.join(report.flags)}")
        return report

    def _problem(self, request: MitigateRequest) -> tuple[Circuit, NoiseModel, Observable]:
        circuit = require_circuit(request.circuit, request.method)
        obs = require_observable(request.observable, request.method)
        obs.check_width(circuit.n_qubits)
        return circuit, load_noise(request.noise), obs

    def _run_zne_richardson(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        result = zne_richardson(_points(request.data))
        return MitigationReport(
            method=request.method,
            estimate=result.estimate,
            overhead={"sum_gamma_squared": result.variance_amplification},
            details={"gammas": result.gammas},
        )

    def _run_zne_exponential(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        points = _points(request.data)
        if len(points) != 2:
            raise InputError(f"Exponential extrapolation takes exactly 2 points, got {len(points)}")
        return MitigationReport(method=request.method, estimate=zne_exponential(*points))

    def _run_zne_polyexp(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        degree = int(request.data.get("degree", 1))
        estimate = zne_polyexp(_points(request.data), degree)
        return MitigationReport(method=request.method, estimate=estimate, details={"degree": degree})

    def _run_zne_lsq(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        order = int(request.data.get("order", 1))
        result = zne_least_squares(_points(request.data), order)
        return MitigationReport(
            method=request.method,
            estimate=result.estimate,
            details={
                "coefficients": result.coefficients,
                "exponents": result.exponents,
                "condition_number": result.condition_number,
            },
        )

    def _run_zne(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        circuit, noise, obs = self._problem(request)
        points = []
        for factor in request.factors:
            scaled = scale_noise_identity_insertion(circuit, factor)
            points.append(NoisyExpectation(value=run_density(scaled, noise).expectation(obs), scale=float(factor)))
        result = zne_richardson(points)
        return MitigationReport(
            method=request.method,
            estimate=result.estimate,
            overhead={"sum_gamma_squared": result.variance_amplification},
            details={"points": [p.model_dump() for p in points], "gammas": result.gammas},
        )

    def _run_pec(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        circuit, noise, obs = self._problem(request)
        pec_rng, raw_rng = rng.spawn(2)
        mitigated = pec_estimate(circuit, noise, obs, request.samples, pec_rng, threads=threads)
        raw = unmitigated_estimate(circuit, noise, obs, request.samples, raw_rng, threads=threads)
        return MitigationReport(
            method=request.method,
            estimate=mitigated.estimate,
            stderr=mitigated.stderr,
            overhead={"Q": mitigated.overhead, "Q_squared": mitigated.overhead**2},
            details={"unmitigated": raw.estimate, "unmitigated_stderr": raw.stderr, "samples": mitigated.samples},
        )

    def _response(self, data: Dict[str, Any]) -> ResponseMatrix:
        if "response" in data:
            return ResponseMatrix(matrix=np.asarray(data["response"], dtype=float))
        if "rates" in data:
            return mem_tpn([tuple(r) for r in data["rates"]])
        raise InputError("Readout inversion needs 'response' or 'rates'")

    def _run_mem_invert(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        if "noisy" not in request.data:
            raise InputError("Readout inversion needs 'noisy'")
        result = mem_invert(self._response(request.data), np.asarray(request.data["noisy"], dtype=float))
        return MitigationReport(
            method=request.method,
            overhead={"condition_number": result.condition_number},
            flags=["clipped"] if result.clipped else [],
            details={"probabilities": result.probabilities, "raw": result.raw},
        )

    def _run_mem_calibrate(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        n_qubits = int(request.data.get("n_qubits", 1))
        backend = request.data.get("backend", "density")
        response = mem_calibrate(load_noise(request.noise), n_qubits, backend, request.samples, rng)
        return MitigationReport(
            method=request.method,
            overhead={"condition_number": response.condition_number()},
            details={"response": response.dense().tolist()},
        )

    def _run_vd(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        circuit, noise, obs = self._problem(request)
        rho = run_density(circuit, noise)
        return MitigationReport(
            method=request.method,
            estimate=vd_estimate(rho, obs, request.copies),
            details={"copies": request.copies, "unmitigated": rho.expectation(obs)},
        )

    def _run_symmetry(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        circuit, noise, obs = self._problem(request)
        if not request.symmetry:
            raise InputError("Symmetry expansion needs --symmetry")
        rho = run_density(circuit, noise)
        result = symmetry_expand(rho, obs, request.symmetry, request.sector)
        return MitigationReport(
            method=request.method,
            estimate=result.estimate,
            overhead={"inverse_sector_weight": result.overhead},
            details={"sector_weight": result.sector_weight, "unmitigated": rho.expectation(obs)},
        )

    def _run_qse(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        circuit, noise, obs = self._problem(request)
        n = circuit.n_qubits
        expansion = request.expansion or ["I" * n] + [
            "I" * q + letter + "I" * (n - q - 1) for q in range(n) for letter in "XYZ"
        ]
        rho = run_density(circuit, noise)
        result = qse_solve(rho, obs, expansion)
        flags = [] if result.rank == len(expansion) else [f"overlap rank {result.rank} of {len(expansion)}"]
        return MitigationReport(
            method=request.method,
            estimate=result.energy,
            flags=flags,
            details={"coefficients": result.coefficients, "expansion": expansion},
        )

    def _run_cdr(self, request: MitigateRequest, rng, threads) -> MitigationReport:
        circuit, noise, obs = self._problem(request)
        result = cdr_mitigate(circuit, noise, obs, rng, n_training=request.training)
        return MitigationReport(
            method=request.method,
            estimate=result.estimate,
            details={"raw": result.raw, "model": result.model.model_dump(), "training": result.training},
        )
