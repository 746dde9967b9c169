"""Exact noisy simulation on the squashed density vector.

A density matrix rho on n qubits is flattened row-major into a 2n-qubit vector:
qubits 0..n-1 carry the row index and n..2n-1 the column index. A unitary U on
targets T becomes U on T followed by conj(U) on T+n, and a channel becomes its
superoperator on T and T+n, so every update reuses the state-vector kernels.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import gate_matrix
from nisqkit.circuits.pauli import Observable, PauliString
from nisqkit.core.errors import NumericalError, WidthMismatchError
from nisqkit.core.logging import get_logger
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.channels import Channel, to_superop
from nisqkit.simulators.statevector import StateVector, bits_to_index, parity

logger = get_logger(__name__)

IMAG_TOL = 1e-10


class SquashedDensityState:
    """Density operator of n qubits stored as a 2n-qubit vector."""

    def __init__(self, n_qubits: int, *, memory_budget: int | None = None):
        self.n_qubits = n_qubits
        self.vector = StateVector(2 * n_qubits, dtype=np.complex128, memory_budget=memory_budget)

    @classmethod
    def from_matrix(cls, rho: np.ndarray, *, memory_budget: int | None = None) -> "SquashedDensityState":
        rho = np.asarray(rho, dtype=complex)
        n = int(rho.shape[0]).bit_length() - 1
        if rho.shape != (1 << n, 1 << n):
            raise WidthMismatchError(f"Density matrix shape {rho.shape} is not 2^n x 2^n")
        state = cls(n, memory_budget=memory_budget)
        state.vector.amplitudes[:] = rho.reshape(-1)
        return state

    @classmethod
    def from_statevector(cls, psi: StateVector) -> "SquashedDensityState":
        amps = psi.amplitudes.astype(complex)
        return cls.from_matrix(np.outer(amps, amps.conj()))

    def copy(self) -> "SquashedDensityState":
        out = SquashedDensityState.__new__(SquashedDensityState)
        out.n_qubits = self.n_qubits
        out.vector = self.vector.copy()
        return out

    def matrix(self) -> np.ndarray:
        """View of rho as a 2^n x 2^n matrix."""
        dim = 1 << self.n_qubits
        return self.vector.amplitudes.reshape(dim, dim)

    def trace(self) -> float:
        return float(np.trace(self.matrix()).real)

    def apply_unitary(self, matrix: np.ndarray, targets: Sequence[int]) -> None:
        n = self.n_qubits
        self.vector.apply_matrix(matrix, targets)
        self.vector.apply_matrix(np.conj(matrix), [t + n for t in targets])

    def apply_channel(self, channel: Channel, targets: Sequence[int]) -> None:
        n = self.n_qubits
        if channel.arity != len(targets):
            raise WidthMismatchError(f"{channel.arity}-qubit channel on targets {tuple(targets)}")
        self.vector.apply_matrix(to_superop(channel), list(targets) + [t + n for t in targets])

    def depolarize(self, fraction: float) -> None:
        """rho -> (1 - f) rho + f I / 2^n."""
        if fraction <= 0:
            return
        rho = self.matrix()
        rho *= 1 - fraction
        rho[np.diag_indices(1 << self.n_qubits)] += fraction / (1 << self.n_qubits)

    def _real(self, value: complex, what: str) -> float:
        if abs(value.imag) > IMAG_TOL:
            raise NumericalError(f"{what} has imaginary part {value.imag:.3e}")
        return float(value.real)

    def probability(self, bits: str) -> float:
        """<b|rho|b>, clamped to [0, 1]."""
        i = bits_to_index(bits, self.n_qubits)
        value = self._real(complex(self.vector.amplitudes[(i << self.n_qubits) | i]), f"P({bits})")
        return min(max(value, 0.0), 1.0)

    def probabilities(self) -> np.ndarray:
        diag = np.diag(self.matrix())
        if np.max(np.abs(diag.imag)) > IMAG_TOL:
            raise NumericalError(f"Diagonal has imaginary part {np.max(np.abs(diag.imag)):.3e}")
        return np.clip(diag.real, 0.0, 1.0)

    def expectation_pauli(self, pauli: PauliString) -> float:
        """Tr(P rho): P acts on the row index, then the diagonal is summed."""
        n = self.n_qubits
        if pauli.n_qubits != n:
            raise WidthMismatchError(f"Pauli word on {pauli.n_qubits} qubits, state has {n}")
        flip, sign, y_count = pauli.masks()
        k = np.arange(1 << n, dtype=np.int64)
        phase = (1 - 2 * parity(k & sign)) * (1j**y_count)
        # Tr(P rho) = sum_k <k^flip| P |k> rho[k, k^flip]
        value = np.sum(phase * self.vector.amplitudes[(k << n) | (k ^ flip)])
        return self._real(complex(value), f"<{pauli.letters}>")

    def expectation(self, obs: Observable) -> float:
        obs.check_width(self.n_qubits)
        return float(sum(t.coefficient * self.expectation_pauli(t) for t in obs.terms))

    def __repr__(self) -> str:
        return f"SquashedDensityState(n_qubits={self.n_qubits})"


def run_density(
    circuit: Circuit,
    noise: NoiseModel | None = None,
    params: Sequence[float] | None = None,
    *,
    memory_budget: int | None = None,
    initial: SquashedDensityState | None = None,
) -> SquashedDensityState:
    """
    Evolve |0...0><0...0| through a noisy circuit.

    Args:
        circuit: Circuit to run.
        noise: Channels fired after matching gates; None means noiseless.
        params: Values for symbolic parameters.
        memory_budget: Override for the 2n-qubit memory check.
        initial: Start from this state instead of |0...0>.

    Returns:
        SquashedDensityState: Final state before readout; the model's global
            depolarizing fraction is already applied.
    """
    noise = noise or NoiseModel()
    if not circuit.is_bound:
        circuit.check_params(params)
    state = initial.copy() if initial is not None else SquashedDensityState(circuit.n_qubits, memory_budget=memory_budget)
    for op in circuit.ops:
        state.apply_unitary(gate_matrix(op, params), op.targets)
        for channel, targets in noise.channels_for(op):
            state.apply_channel(channel, targets)
    state.depolarize(noise.global_depolarizing)
    logger.debug(f"Density run on {circuit.n_qubits} qubits, trace {state.trace():.12f}")
    return state


def probability(state: SquashedDensityState, bits: str) -> float:
    return state.probability(bits)


def expectation_density(state: SquashedDensityState, obs: Observable) -> float:
    return state.expectation(obs)


def as_density_matrix(rho: "SquashedDensityState | np.ndarray") -> np.ndarray:
    """Dense 2^n x 2^n matrix of a squashed state or a matrix-like input."""
    if isinstance(rho, SquashedDensityState):
        return rho.matrix()
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape != (dim, dim) or dim & (dim - 1):
        raise WidthMismatchError(f"Density matrix shape {rho.shape} is not 2^n x 2^n")
    return rho
