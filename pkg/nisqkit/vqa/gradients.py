"""Gradients of a variational loss: finite differences, parameter shift and adjoint."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.gates import ROTATION_AXIS, Gate
from nisqkit.circuits.pauli import PauliString
from nisqkit.core.errors import BackendError, InputError
from nisqkit.core.logging import get_logger
from nisqkit.simulators.statevector import StateVector, accumulate_pauli, bilinear_pauli
from nisqkit.vqa.loss import LossSpec, evaluate, loss

logger = get_logger(__name__)

SHIFT = np.pi / 2


def grad_fd1(spec: LossSpec, theta: Sequence[float], delta: float = 1e-5) -> np.ndarray:
    """Forward differences; m + 1 loss evaluations."""
    if delta <= 0:
        raise InputError("Finite-difference step must be positive")
    theta = spec.check(theta)
    base = loss(spec, theta)
    grad = np.zeros_like(theta)
    for j in range(len(theta)):
        shifted = theta.copy()
        shifted[j] += delta
        grad[j] = (loss(spec, shifted) - base) / delta
    return grad


def grad_fd2(spec: LossSpec, theta: Sequence[float], delta: float = 1e-4) -> np.ndarray:
    """Central differences; 2m loss evaluations."""
    if delta <= 0:
        raise InputError("Finite-difference step must be positive")
    theta = spec.check(theta)
    grad = np.zeros_like(theta)
    for j in range(len(theta)):
        plus, minus = theta.copy(), theta.copy()
        plus[j] += delta
        minus[j] -= delta
        grad[j] = (loss(spec, plus) - loss(spec, minus)) / (2 * delta)
    return grad


def grad_pshift(spec: LossSpec, theta: Sequence[float]) -> np.ndarray:
    """
    Parameter-shift gradient.

    Every occurrence of a slot is shifted separately by +-pi/2 in its own
    angle; the occurrence contributes scale * (L+ - L-) / 2 to its slot.
    """
    theta = spec.check(theta)
    bound = spec.circuit.bind(theta)
    grad = np.zeros_like(theta)
    for k, op in spec.circuit.parametric_ops():
        if op.kind not in ROTATION_AXIS:
            raise InputError(f"Parameter shift needs Pauli rotations, got {op.kind.value}")
        angle = bound.ops[k].param
        values = []
        for sign in (1, -1):
            ops = list(bound.ops)
            ops[k] = Gate(op.kind, op.targets, angle + sign * SHIFT)
            values.append(evaluate(bound.with_ops(ops), spec.hamiltonian, spec.backend, **spec.mps_options))
        grad[op.param.index] += op.param.scale * 0.5 * (values[0] - values[1])
    return grad


def _generator(op: Gate, n_qubits: int) -> PauliString:
    letters = ["I"] * n_qubits
    letters[op.targets[0]] = ROTATION_AXIS[op.kind]
    return PauliString("".join(letters))


def grad_adjoint(spec: LossSpec, theta: Sequence[float]) -> np.ndarray:
    """
    Adjoint (reverse-mode) gradient with two live state buffers.

    Forward: phi = C|0>, lam = H phi. Backward over gates j = m..1: for a
    rotation exp(-i t P / 2) with t = scale * theta[slot], add
    scale * Im<lam|P|phi> to the slot, then undo gate j on both buffers.
    """
    if spec.backend != "sv":
        raise BackendError(f"Adjoint gradients need inverse-gate support; backend '{spec.backend}' has none")
    theta = spec.check(theta)
    circuit = spec.circuit
    n = circuit.n_qubits
    grad = np.zeros_like(theta)
    if not circuit.n_params:
        return grad

    phi = StateVector(n, dtype=np.complex128)
    phi.apply_circuit(circuit, theta)
    lam = StateVector(n, np.zeros(1 << n), dtype=np.complex128)
    for term in spec.hamiltonian.terms:
        accumulate_pauli(lam, phi, term)

    for op in reversed(circuit.ops):
        if op.is_symbolic:
            if op.kind not in ROTATION_AXIS:
                raise InputError(f"Adjoint gradient needs Pauli rotations, got {op.kind.value}")
            overlap = bilinear_pauli(lam, phi, _generator(op, n))
            grad[op.param.index] += op.param.scale * overlap.imag
        inverse = op.bind(theta).adjoint()
        phi.apply_gate(inverse)
        lam.apply_gate(inverse)
    return grad


GRADIENTS = {
    "fd1": grad_fd1,
    "fd2": grad_fd2,
    "pshift": grad_pshift,
    "adjoint": grad_adjoint,
}


def gradient(spec: LossSpec, theta: Sequence[float], method: str = "adjoint", delta: float | None = None) -> np.ndarray:
    try:
        fn = GRADIENTS[method]
    except KeyError:
        raise InputError(f"Unknown gradient method '{method}'. Choose from {sorted(GRADIENTS)}")
    if method in ("fd1", "fd2") and delta is not None:
        return fn(spec, theta, delta)
    return fn(spec, theta)
