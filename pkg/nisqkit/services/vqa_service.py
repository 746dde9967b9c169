from typing import Any, Dict

import numpy as np
from pydantic import ValidationError

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Parameter, rx
from nisqkit.circuits.pauli import Observable, PauliString, all_pauli_words, parse_observable
from nisqkit.core.errors import InputError, NumericalError
from nisqkit.core.logging import get_logger
from nisqkit.models.report import VQARequest
from nisqkit.models.vqa import OptimizerConfig
from nisqkit.vqa.ansatz import hardware_efficient_ansatz, random_parametric_circuit
from nisqkit.vqa.gradients import grad_adjoint, grad_fd2, grad_pshift
from nisqkit.vqa.loss import LossSpec
from nisqkit.vqa.optimizer import optimize
from nisqkit.vqa.qaoa import MaxCutProblem, qaoa_maxcut

logger = get_logger(__name__)

ADJOINT_VS_SHIFT_TOL = 1e-10
ANALYTIC_VS_FD_TOL = 1e-6
CLOSED_FORM_TOL = 1e-12
FD_STEP = 1e-4


def random_hamiltonian(n_qubits: int, terms: int, rng: np.random.Generator) -> Observable:
    """Random real combination of non-identity Pauli words."""
    words = all_pauli_words(n_qubits)[1:]
    picks = rng.choice(len(words), size=min(terms, len(words)), replace=False)
    return Observable(tuple(PauliString(words[int(k)], float(rng.normal())) for k in picks))


class VQAService:
    """Service for variational runs and gradient cross-checks."""

    def gradcheck(self, rng: np.random.Generator, cases: int = 20, max_qubits: int = 5, max_params: int = 20) -> Dict[str, Any]:
        """
        Compare adjoint, parameter-shift and central-difference gradients.

        Random circuits get random Hamiltonians and parameters; the closed form
        d/dt <Z> = -sin t of Rx(t)|0> is checked as well.

        Raises:
            NumericalError: Any pair of gradients disagrees beyond its tolerance.
        """
        theta = 0.7
        closed = grad_adjoint(LossSpec(Circuit(1, (rx(Parameter(0), 0),)), parse_observable("Z")), [theta])[0]
        closed_error = abs(closed + np.sin(theta))
        worst_shift, worst_fd = 0.0, 0.0
        for child in rng.spawn(cases):
            n = int(child.integers(1, max_qubits + 1))
            n_params = int(child.integers(1, max_params + 1))
            circuit = random_parametric_circuit(n, n_params, n_params + int(child.integers(0, 3 * n_params + 1)), child)
            spec = LossSpec(circuit, random_hamiltonian(n, 4, child))
            params = child.uniform(-np.pi, np.pi, n_params)
            adjoint = grad_adjoint(spec, params)
            worst_shift = max(worst_shift, float(np.max(np.abs(adjoint - grad_pshift(spec, params)))))
            worst_fd = max(worst_fd, float(np.max(np.abs(adjoint - grad_fd2(spec, params, FD_STEP)))))
        report = {
            "cases": cases,
            "closed_form_error": float(closed_error),
            "max_adjoint_vs_shift": worst_shift,
            "max_adjoint_vs_central_difference": worst_fd,
        }
        logger.info(f"Gradient check: {report}")
        if closed_error > CLOSED_FORM_TOL or worst_shift > ADJOINT_VS_SHIFT_TOL or worst_fd > ANALYTIC_VS_FD_TOL:
            raise NumericalError(f"Gradient methods disagree: {report}")
        return report

    def run(self, request: VQARequest, rng: np.random.Generator) -> Dict[str, Any]:
        """
        Run QAOA MaxCut or VQE with a hardware-efficient ansatz.

        Returns:
            Dict[str, Any]: Final parameters, loss and the iterate history.
        """
        try:
            config = OptimizerConfig(**request.optimizer)
        except ValidationError as e:
            raise InputError(f"Error in optimizer settings: {str(e)}") from e
        if request.problem == "qaoa":
            if not request.graph:
                raise InputError("QAOA needs --graph with an edge list")
            problem = MaxCutProblem.from_text(request.graph)
            return qaoa_maxcut(problem, request.p, config, rng).model_dump()
        if not request.hamiltonian:
            raise InputError("VQE needs --hamiltonian")
        hamiltonian = parse_observable(request.hamiltonian)
        circuit = hardware_efficient_ansatz(hamiltonian.n_qubits, request.layers)
        theta0 = rng.uniform(-0.1, 0.1, circuit.n_params)
        trace = optimize(LossSpec(circuit, hamiltonian), theta0, config)
        return {"energy": trace.final.loss, "params": trace.final.params, "trace": trace.model_dump()}
