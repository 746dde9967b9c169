from typing import Any, Dict

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.core.errors import BackendError, InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.report import SimulateRequest
from nisqkit.noise.density import run_density
from nisqkit.noise.readout import apply_readout
from nisqkit.noise.trajectories import run_pauli_mc
from nisqkit.simulators.feynman import Bipartition, count_paths, sf_amplitude
from nisqkit.simulators.mps import simulate_mps
from nisqkit.simulators.peps import init_zero_grid
from nisqkit.simulators.statevector import index_to_bits, simulate
from nisqkit.utils.inputs import complex_pair, load_noise, parse_grid, require_observable

logger = get_logger(__name__)

SUPPORTED_TASKS = {
    "sv": {"amplitude", "sample", "expectation", "probabilities"},
    "mps": {"amplitude", "sample", "expectation"},
    "peps": {"amplitude"},
    "feynman": {"amplitude"},
    "density": {"sample", "expectation", "probabilities"},
    "mc": {"sample", "expectation"},
}


class SimulationService:
    """Service for running circuits on the simulator backends."""

    def run(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        """
        Execute one simulation task.

        Args:
            request: Backend, task and task options.
            circuit: Parsed circuit.
            rng: Generator for sampling tasks.

        Returns:
            Dict[str, Any]: Task payload (amplitude, samples, expectation or probabilities).
        """
        if request.task not in SUPPORTED_TASKS[request.backend]:
            raise BackendError(f"Backend '{request.backend}' does not support task '{request.task}'")
        if request.task == "amplitude" and not request.bits:
            raise InputError("Amplitude task needs --bits")
        bound = circuit.bind(request.params)
        handler = getattr(self, f"_run_{request.backend}")
        result = handler(request, bound, rng)
        logger.info(f"Simulated {len(bound)} gates on {bound.n_qubits} qubits with backend {request.backend}")
        return result

    def _run_sv(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        state = simulate(circuit)
        if request.task == "amplitude":
            return {"amplitude": complex_pair(state.amplitude(request.bits))}
        if request.task == "sample":
            return {"samples": state.sample(request.shots, rng)}
        if request.task == "expectation":
            obs = require_observable(request.observable, "Expectation task")
            return {"expectation": state.expectation(obs), "stderr": 0.0}
        return {"probabilities": state.probabilities().tolist()}

    def _run_mps(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        state = simulate_mps(circuit, max_bond=request.max_bond, truncation=request.truncation)
        extra = {"bond_dims": state.bond_dims, "discarded_weight": float(state.discarded_weight)}
        if request.task == "amplitude":
            return {"amplitude": complex_pair(state.amplitude(request.bits)), **extra}
        if request.task == "sample":
            return {"samples": state.sample(request.shots, rng), **extra}
        obs = require_observable(request.observable, "Expectation task")
        return {"expectation": state.expectation(obs), "stderr": 0.0, **extra}

    def _run_peps(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        if not request.grid:
            raise InputError("PEPS backend needs --grid HxV")
        state = init_zero_grid(*parse_grid(request.grid)).apply_circuit(circuit)
        return {"amplitude": complex_pair(state.amplitude(request.bits)), "max_bond": state.max_bond()}

    def _run_feynman(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        half = request.partition or list(range(circuit.n_qubits // 2))
        part = Bipartition.split(circuit.n_qubits, half)
        value = sf_amplitude(circuit, request.bits, part)
        return {"amplitude": complex_pair(value), "paths": count_paths(circuit, part)}

    def _run_density(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        noise = load_noise(request.noise)
        state = run_density(circuit, noise)
        if request.task == "expectation":
            obs = require_observable(request.observable, "Expectation task")
            return {"expectation": state.expectation(obs), "stderr": 0.0, "trace": state.trace()}
        probs = apply_readout(state.probabilities(), noise, circuit.n_qubits)
        probs = probs / probs.sum()
        if request.task == "probabilities":
            return {"probabilities": probs.tolist(), "trace": state.trace()}
        draws = rng.choice(len(probs), size=request.shots, p=probs)
        return {"samples": [index_to_bits(int(i), circuit.n_qubits) for i in draws]}

    def _run_mc(self, request: SimulateRequest, circuit: Circuit, rng: np.random.Generator) -> Dict[str, Any]:
        noise = load_noise(request.noise)
        observables = [require_observable(request.observable, "Expectation task")] if request.task == "expectation" else []
        result = run_pauli_mc(circuit, noise, request.shots, rng, observables)
        if request.task == "expectation":
            mean, stderr = result.estimates[0]
            return {"expectation": mean, "stderr": stderr, "unique_trajectories": result.unique_trajectories}
        return {"samples": result.samples, "unique_trajectories": result.unique_trajectories}
