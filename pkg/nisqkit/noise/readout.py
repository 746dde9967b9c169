"""Classical readout confusion applied to output distributions and samples."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.core.errors import WidthMismatchError
from nisqkit.models.noise import NoiseModel


def confusion_matrix(p01: float, p10: float) -> np.ndarray:
    """Column-stochastic 2x2 response: column = prepared bit, row = read bit."""
    return np.array([[1 - p01, p10], [p01, 1 - p10]])


def apply_factored(probs: np.ndarray, factors: Sequence[np.ndarray | None]) -> np.ndarray:
    """
    Apply a tensor product of 2x2 matrices to a distribution without materializing it.

    Args:
        probs: Vector of length 2^n, qubit 0 most significant.
        factors: One 2x2 matrix per qubit, or None for identity.
    """
    n = len(factors)
    if probs.shape[0] != 1 << n:
        raise WidthMismatchError(f"Distribution of length {probs.shape[0]} does not match {n} qubits")
    t = np.asarray(probs, dtype=float).reshape([2] * n)
    for q, m in enumerate(factors):
        if m is None:
            continue
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def apply_readout(probs: np.ndarray, noise: NoiseModel, n_qubits: int) -> np.ndarray:
    """Distribution the classical readout reports for an ideal distribution."""
    if not noise.readout:
        return np.asarray(probs, dtype=float)
    factors = [confusion_matrix(*noise.readout_rates(q)) if q in noise.readout else None for q in range(n_qubits)]
    return apply_factored(probs, factors)


def flip_samples(samples: list[str], noise: NoiseModel, rng: np.random.Generator) -> list[str]:
    """Apply readout flips to sampled bitstrings."""
    if not noise.readout or not samples:
        return samples
    bits = np.array([[c == "1" for c in s] for s in samples], dtype=bool)
    for q in noise.readout:
        if q >= bits.shape[1]:
            continue
        p01, p10 = noise.readout_rates(q)
        u = rng.random(len(samples))
        flip = np.where(bits[:, q], u < p10, u < p01)
        bits[:, q] ^= flip
    return ["".join("1" if b else "0" for b in row) for row in bits]


def measured_distribution(
    circuit: Circuit, noise: NoiseModel | None = None, params: Sequence[float] | None = None
) -> np.ndarray:
    """Exact output distribution of a noisy circuit including readout confusion."""
    from nisqkit.noise.density import run_density

    noise = noise or NoiseModel()
    probs = run_density(circuit, noise, params).probabilities()
    probs = apply_readout(probs, noise, circuit.n_qubits)
    return probs / probs.sum()
