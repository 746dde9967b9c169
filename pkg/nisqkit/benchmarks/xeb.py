"""Cross-entropy benchmarking of single-qubit gates and a two-qubit cycle."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from nisqkit.benchmarks.fitting import fit_exponential_decay
from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, cz, raw
from nisqkit.core.config import settings
from nisqkit.core.errors import FitError
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import DecayFit, XEBConfig, XEBResult
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.readout import measured_distribution
from nisqkit.utils.cache import ideal_distribution

logger = get_logger(__name__)

PROB_FLOOR = np.finfo(float).tiny
DEGENERATE_DENOMINATOR = 1e-12


def half_pi_rotation(phi: float) -> np.ndarray:
    """pi/2 rotation about the equatorial axis cos(phi) X + sin(phi) Y."""
    c = 1 / np.sqrt(2)
    off = -1j * c * np.exp(-1j * phi)
    return np.array([[c, off], [-1j * c * np.exp(1j * phi), c]], dtype=complex)


# +-X, +-Y and +-(X +- Y) axes.
GATE_SET = tuple(half_pi_rotation(k * np.pi / 4) for k in range(8))


def _marginal(probs: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    t = probs.reshape([2] * n_qubits)
    drop = tuple(q for q in range(n_qubits) if q not in keep)
    return t.sum(axis=drop).reshape(-1) if drop else probs


def cross_entropy(p: np.ndarray, q: np.ndarray) -> float:
    """H(p, q) = -sum_i p_i log q_i."""
    return float(-np.sum(p * np.log(np.maximum(q, PROB_FLOOR))))


def xeb_alpha(measured: np.ndarray, ideal: np.ndarray) -> float | None:
    """
    (H(uniform, ideal) - H(measured, ideal)) / (H(uniform, ideal) - H(ideal, ideal)).

    Returns None when the ideal distribution is uniform and the ratio is undefined.
    """
    uniform = np.full_like(ideal, 1.0 / len(ideal))
    h_uniform = cross_entropy(uniform, ideal)
    denominator = h_uniform - cross_entropy(ideal, ideal)
    if denominator < DEGENERATE_DENOMINATOR:
        return None
    return (h_uniform - cross_entropy(measured, ideal)) / denominator


def xeb_sequence(n_qubits: int, active: Sequence[int], cycles: int, rng: np.random.Generator) -> Circuit:
    """
    Random XEB circuit on `active` qubits of an n-qubit register.

    One active qubit: `cycles` random pi/2 rotations plus a final one. Two
    active qubits: `cycles` of (random rotation on each, CZ) plus a final layer.
    """
    ops: list[Gate] = []
    for _ in range(cycles):
        ops += [raw(GATE_SET[int(rng.integers(8))], q) for q in active]
        if len(active) == 2:
            ops.append(cz(*active))
    ops += [raw(GATE_SET[int(rng.integers(8))], q) for q in active]
    return Circuit(n_qubits, tuple(ops))


def _measured(circuit: Circuit, noise: NoiseModel, shots: int, rng: np.random.Generator) -> np.ndarray:
    probs = measured_distribution(circuit, noise)
    if shots <= 0:
        return probs
    return rng.multinomial(shots, probs / probs.sum()) / shots


def _decay_points(config: XEBConfig, noise, rng, active, threads) -> list[tuple[float, float]]:
    jobs = [(m, child) for m in config.lengths for child in rng.spawn(config.sequences)]

    def run(job) -> float | None:
        m, child = job
        circuit = xeb_sequence(config.n_qubits, active, m, child)
        ideal = _marginal(ideal_distribution(circuit), config.n_qubits, active)
        measured = _marginal(_measured(circuit, noise, config.shots, child), config.n_qubits, active)
        return xeb_alpha(measured, ideal)

    workers = max(1, threads or settings.THREADS)
    if workers == 1:
        alphas = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            alphas = list(pool.map(run, jobs))
    points = []
    for i, m in enumerate(config.lengths):
        values = [a for a in alphas[i * config.sequences:(i + 1) * config.sequences] if a is not None]
        if values:
            points.append((float(m), float(np.mean(values))))
        else:
            logger.debug(f"XEB length {m}: every ideal distribution was uniform, point dropped")
    if len(points) < 3:
        raise FitError("Too few XEB lengths with a defined alpha", points)
    return points


def _rates(p: float, n_qubits: int) -> tuple[float, float]:
    dim = 1 << n_qubits
    r = (dim - 1) / dim * (1 - p)
    return r, (dim - 1) / dim * r


def xeb_run(
    config: XEBConfig,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    *,
    threads: int | None = None,
) -> XEBResult:
    """
    Cross-entropy benchmarking with a decay fit of the mean alpha per length.

    In two-qubit mode the single-qubit sequences are also run on each qubit and
    the cycle decay is divided by both single-qubit decays to isolate the CZ.
    """
    noise = noise or NoiseModel()
    rng = rng or np.random.default_rng(settings.SEED)
    active = tuple(range(config.n_qubits))
    points = _decay_points(config, noise, rng, active, threads)
    fit = fit_exponential_decay(points)
    r, r_pauli = _rates(fit.p, config.n_qubits)
    result = XEBResult(alphas=[(int(m), a) for m, a in points], fit=fit, error_rate=r, pauli_error=r_pauli)
    if config.n_qubits == 2:
        singles: list[DecayFit] = [
            fit_exponential_decay(_decay_points(config, noise, rng, (q,), threads)) for q in active
        ]
        gate_decay = fit.p / (singles[0].p * singles[1].p)
        result.single_qubit_fits = singles
        result.gate_decay = gate_decay
        result.gate_error_rate = _rates(gate_decay, 2)[0]
    logger.info(f"XEB on {config.n_qubits} qubit(s): p = {fit.p:.6f}, r = {r:.3e}")
    return result
