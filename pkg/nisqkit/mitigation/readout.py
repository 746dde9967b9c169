"""Measurement-error mitigation with response matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import x
from nisqkit.core.errors import InputError, RankDeficiencyError, WidthMismatchError
from nisqkit.core.logging import get_logger
from nisqkit.models.mitigation import MEMResult
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.readout import apply_factored, confusion_matrix, measured_distribution
from nisqkit.noise.trajectories import run_pauli_mc
from nisqkit.simulators.statevector import bits_to_index, index_to_bits

logger = get_logger(__name__)

STOCHASTIC_TOL = 1e-8
SINGULAR_CONDITION = 1e12


@dataclass(frozen=True)
class ResponseMatrix:
    """
    Column-stochastic response Lambda[read, prepared].

    Stored either dense or as one 2x2 factor per qubit (tensor-product noise).
    """

    matrix: np.ndarray | None = None
    factors: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        if (self.matrix is None) == (self.factors is None):
            raise InputError("Give either a dense matrix or per-qubit factors")
        for m in [self.matrix] if self.matrix is not None else self.factors:
            m = np.asarray(m, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
                raise InputError(f"Response matrix must be square with power-of-two size, got {m.shape}")
            if np.min(m) < -STOCHASTIC_TOL or np.max(np.abs(m.sum(axis=0) - 1)) > STOCHASTIC_TOL:
                raise InputError("Response matrix must be non-negative with columns summing to 1")
        if self.matrix is not None:
            object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        else:
            object.__setattr__(self, "factors", tuple(np.asarray(f, dtype=float) for f in self.factors))

    @property
    def is_factored(self) -> bool:
        return self.factors is not None

    @property
    def n_qubits(self) -> int:
        if self.factors is not None:
            return len(self.factors)
        return int(self.matrix.shape[0]).bit_length() - 1

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        out = np.ones((1, 1))
        for f in self.factors:
            out = np.kron(out, f)
        return out

    def condition_number(self) -> float:
        if self.factors is not None:
            return float(np.prod([np.linalg.cond(f) for f in self.factors]))
        return float(np.linalg.cond(self.matrix))

    def _check(self, probs) -> np.ndarray:
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (1 << self.n_qubits,):
            raise WidthMismatchError(f"Distribution of length {probs.shape[0]} for a {self.n_qubits}-qubit response")
        return probs

    def apply(self, probs) -> np.ndarray:
        probs = self._check(probs)
        if self.factors is not None:
            return apply_factored(probs, self.factors)
        return self.matrix @ probs

    def solve(self, probs) -> np.ndarray:
        """Lambda^-1 p, factor by factor when factored."""
        probs = self._check(probs)
        cond = self.condition_number()
        if not np.isfinite(cond) or cond > SINGULAR_CONDITION:
            raise RankDeficiencyError(f"Response matrix is singular (condition number {cond:.3e})")
        if self.factors is not None:
            return apply_factored(probs, [np.linalg.inv(f) for f in self.factors])
        return np.linalg.solve(self.matrix, probs)


def mem_tpn(rates: Sequence[tuple[float, float]]) -> ResponseMatrix:
    """
    Tensor-product response from per-qubit rates.

    Args:
        rates: (p_i, q_i) per qubit with p_i = P(read 1 | 0) and q_i = P(read 0 | 1).
    """
    if not rates:
        raise InputError("Need rates for at least one qubit")
    for q, (p01, p10) in enumerate(rates):
        if not (0 <= p01 <= 1 and 0 <= p10 <= 1):
            raise InputError(f"Readout rates for qubit {q} must lie in [0, 1]")
    return ResponseMatrix(factors=tuple(confusion_matrix(p01, p10) for p01, p10 in rates))


def _preparation(bits: str) -> Circuit:
    return Circuit(len(bits), tuple(x(q) for q, b in enumerate(bits) if b == "1"))


def mem_calibrate(
    noise: NoiseModel | None,
    n_qubits: int,
    backend: Literal["density", "samples"] = "density",
    shots: int = 10000,
    rng: np.random.Generator | None = None,
) -> ResponseMatrix:
    """
    Measure the response matrix by preparing every basis state.

    Column y holds the measured distribution after preparing |y>, either exactly
    from the density simulator or as a histogram of sampled shots.
    """
    noise = noise or NoiseModel()
    if n_qubits < 1:
        raise InputError("Need at least one qubit")
    dim = 1 << n_qubits
    columns = []
    for y in range(dim):
        circuit = _preparation(index_to_bits(y, n_qubits))
        if backend == "density":
            columns.append(measured_distribution(circuit, noise))
        elif backend == "samples":
            if rng is None:
                raise InputError("Sampled calibration needs a generator")
            counts = np.zeros(dim)
            for s in run_pauli_mc(circuit, noise, shots, rng).samples:
                counts[bits_to_index(s, n_qubits)] += 1
            columns.append(counts / shots)
        else:
            raise InputError(f"Unknown calibration backend '{backend}'")
    logger.info(f"Calibrated {dim}x{dim} response matrix ({backend})")
    return ResponseMatrix(matrix=np.column_stack(columns))


def mem_invert(response: ResponseMatrix | np.ndarray, noisy) -> MEMResult:
    """
    Solve Lambda p = p_noisy.

    Negative entries are clipped to zero and the result renormalized; the
    clipped flag records that the raw solution was unphysical.
    """
    if not isinstance(response, ResponseMatrix):
        response = ResponseMatrix(matrix=response)
    raw = response.solve(noisy)
    clipped = bool(np.any(raw < 0))
    probs = raw
    if clipped:
        probs = np.clip(raw, 0.0, None)
        total = probs.sum()
        if total <= 0:
            raise RankDeficiencyError("Clipped distribution is identically zero")
        probs = probs / total
        logger.warning(f"Readout inversion gave negative probabilities (min {raw.min():.4g}); clipped and renormalized")
    return MEMResult(
        probabilities=probs.tolist(), raw=raw.tolist(), clipped=clipped, condition_number=response.condition_number()
    )
