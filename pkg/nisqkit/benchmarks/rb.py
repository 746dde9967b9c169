"""Clifford randomized benchmarking."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from nisqkit.benchmarks.clifford import clifford_group
from nisqkit.benchmarks.fitting import average_error_rate, fit_exponential_decay
from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate
from nisqkit.core.config import settings
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import RBConfig, RBResult
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.readout import measured_distribution

logger = get_logger(__name__)


def rb_sequence(n_qubits: int, length: int, rng: np.random.Generator, compile_cliffords: bool = True) -> Circuit:
    """
    m random Cliffords followed by the Clifford inverting their product.

    Args:
        n_qubits: 1 or 2.
        length: Number of random Cliffords m.
        rng: Generator.
        compile_cliffords: Emit each Clifford as one raw gate instead of its H/S/CX word.
    """
    group = clifford_group(n_qubits)
    elements = [group.sample(rng) for _ in range(length)]
    word = [g for e in elements for g in group.words[e]]
    elements.append(group.inverse(word))
    ops: list[Gate] = []
    for e in elements:
        if compile_cliffords:
            ops.append(group.as_gate(e))
        else:
            ops.extend(group.words[e])
    return Circuit(n_qubits, tuple(ops))


def survival_probability(
    circuit: Circuit, noise: NoiseModel, shots: int = 0, rng: np.random.Generator | None = None
) -> float:
    """Probability of reading all zeros, exact or estimated from `shots` draws."""
    exact = float(measured_distribution(circuit, noise)[0])
    if shots <= 0:
        return exact
    return float(rng.binomial(shots, min(max(exact, 0.0), 1.0)) / shots)


def rb_run(
    config: RBConfig,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    *,
    threads: int | None = None,
) -> RBResult:
    """
    Run Clifford RB and fit the mean survivals.

    Args:
        config: Lengths, sequences per length, shots.
        noise: Noise model; noiseless when omitted.
        rng: Master generator; each (length, sequence) gets a spawned child.
        threads: Worker count.

    Returns:
        RBResult: Decay fit and r = (2^n - 1) / 2^n (1 - p).
    """
    noise = noise or NoiseModel()
    rng = rng or np.random.default_rng(settings.SEED)
    clifford_group(config.n_qubits)
    jobs = [(m, child) for m in config.lengths for child in rng.spawn(config.sequences)]

    def run(job) -> float:
        m, child = job
        circuit = rb_sequence(config.n_qubits, m, child, config.compile_cliffords)
        return survival_probability(circuit, noise, config.shots, child)

    workers = max(1, threads or settings.THREADS)
    if workers == 1:
        survivals = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            survivals = list(pool.map(run, jobs))
    table = np.array(survivals).reshape(len(config.lengths), config.sequences)
    points = [(float(m), float(row.mean())) for m, row in zip(config.lengths, table)]
    fit = fit_exponential_decay(points)
    r = average_error_rate(fit.p, config.n_qubits)
    logger.info(f"RB on {config.n_qubits} qubit(s): p = {fit.p:.6f}, r = {r:.3e}")
    return RBResult(fit=fit, error_rate=r)
