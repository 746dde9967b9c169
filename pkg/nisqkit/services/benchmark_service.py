from typing import Any, Dict

import numpy as np
from pydantic import ValidationError

from nisqkit.benchmarks.mirror import mirror_run, random_clifford_circuit
from nisqkit.benchmarks.quantum_volume import qv_run
from nisqkit.benchmarks.rb import rb_run
from nisqkit.benchmarks.rqc import linear_xeb_fidelity, rqc_generate
from nisqkit.benchmarks.xeb import xeb_run
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.qasm import parse_circuit
from nisqkit.core.errors import InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import RBConfig, XEBConfig
from nisqkit.models.noise import NoiseModel
from nisqkit.models.report import BenchmarkRequest
from nisqkit.noise.readout import measured_distribution
from nisqkit.simulators.statevector import index_to_bits
from nisqkit.utils.inputs import load_noise, parse_grid

logger = get_logger(__name__)

GRAPH_FAMILIES = {"line": CouplingGraph.line, "complete": CouplingGraph.complete}


class BenchmarkService:
    """Service for running benchmarking protocols against a noise model."""

    def run(self, request: BenchmarkRequest, rng: np.random.Generator, threads: int) -> Dict[str, Any]:
        """
        Run one protocol.

        Args:
            request: Protocol and schedule.
            rng: Master generator.
            threads: Worker count.

        Returns:
            Dict[str, Any]: The protocol result as plain data.
        """
        noise = load_noise(request.noise)
        handler = getattr(self, "_run_" + request.protocol.replace("-", "_"))
        try:
            return handler(request, noise, rng, threads)
        except ValidationError as e:
            raise InputError(f"Error in {request.protocol} schedule: {str(e)}") from e

    def _schedule(self, request: BenchmarkRequest) -> Dict[str, Any]:
        schedule = {"n_qubits": request.n_qubits, "sequences": request.sequences}
        if request.lengths is not None:
            schedule["lengths"] = request.lengths
        if request.shots is not None:
            schedule["shots"] = request.shots
        return schedule

    def _run_rb(self, request: BenchmarkRequest, noise: NoiseModel, rng, threads) -> Dict[str, Any]:
        config = RBConfig(**self._schedule(request))
        return rb_run(config, noise, rng, threads=threads).model_dump()

    def _run_xeb(self, request: BenchmarkRequest, noise: NoiseModel, rng, threads) -> Dict[str, Any]:
        config = XEBConfig(**self._schedule(request))
        return xeb_run(config, noise, rng, threads=threads).model_dump()

    def _run_qv(self, request: BenchmarkRequest, noise: NoiseModel, rng, threads) -> Dict[str, Any]:
        factory = None
        if request.route:
            if request.route not in GRAPH_FAMILIES:
                raise InputError(f"Unknown coupling family '{request.route}'; use one of {sorted(GRAPH_FAMILIES)}")
            factory = GRAPH_FAMILIES[request.route]
        result = qv_run(
            request.max_width,
            noise,
            rng,
            request.circuits_per_width,
            shots=request.shots or 0,
            graph_factory=factory,
            threads=threads,
        )
        return result.model_dump()

    def _run_mirror(self, request: BenchmarkRequest, noise: NoiseModel, rng, threads) -> Dict[str, Any]:
        if request.circuit:
            base = parse_circuit(request.circuit)
        else:
            base = random_clifford_circuit(request.n_qubits, 4, rng.spawn(1)[0])
        result = mirror_run(base, noise, rng, request.repetitions, shots=request.shots or 0, threads=threads)
        return result.model_dump()

    def _run_rqc_xeb(self, request: BenchmarkRequest, noise: NoiseModel, rng, threads) -> Dict[str, Any]:
        n_h, n_v = parse_grid(request.grid)
        circuit_rng, sample_rng = rng.spawn(2)
        circuit = rqc_generate(n_h, n_v, request.cycles, circuit_rng)
        probs = measured_distribution(circuit, noise)
        draws = sample_rng.choice(len(probs), size=request.samples, p=probs)
        samples = [index_to_bits(int(i), circuit.n_qubits) for i in draws]
        result = linear_xeb_fidelity(circuit, samples)
        logger.info(f"RQC {n_h}x{n_v}, {request.cycles} cycles: F_XEB = {result.fidelity:.4f}")
        return {"grid": [n_h, n_v], "cycles": request.cycles, "gates": len(circuit), **result.model_dump()}
