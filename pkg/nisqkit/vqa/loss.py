from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.pauli import Observable
from nisqkit.core.errors import BackendError, ParameterError
from nisqkit.simulators.mps import simulate_mps
from nisqkit.simulators.statevector import simulate

Backend = Literal["sv", "mps"]


@dataclass(frozen=True)
class LossSpec:
    """Loss <0|C(theta)^dag H C(theta)|0> of a parametric circuit."""

    circuit: Circuit
    hamiltonian: Observable
    backend: Backend = "sv"
    mps_options: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hamiltonian.check_width(self.circuit.n_qubits)
        if self.backend not in ("sv", "mps"):
            raise BackendError(f"Unknown backend '{self.backend}'")

    @property
    def n_params(self) -> int:
        return self.circuit.n_params

    def check(self, theta: Sequence[float]) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.shape[0] != self.n_params:
            raise ParameterError(f"Expected {self.n_params} parameters, got {theta.shape[0]}")
        return theta


def evaluate(circuit: Circuit, hamiltonian: Observable, backend: Backend = "sv", **mps_options) -> float:
    """Expectation of H on the output of a bound circuit."""
    if backend == "mps":
        return simulate_mps(circuit, **mps_options).expectation(hamiltonian)
    return simulate(circuit).expectation(hamiltonian)


def loss(spec: LossSpec, theta: Sequence[float]) -> float:
    theta = spec.check(theta)
    return evaluate(spec.circuit.bind(theta), spec.hamiltonian, spec.backend, **spec.mps_options)
