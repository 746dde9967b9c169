"""Quantum Volume: square random circuits and the heavy-output test."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np
from scipy import linalg

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import Gate, raw
from nisqkit.compiler.routing import apply_layout, route
from nisqkit.core.config import settings
from nisqkit.core.errors import IdealSimulationBudgetError, InputError, NumericalError
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import QVResult, QVWidthResult
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.readout import measured_distribution
from nisqkit.utils.cache import ideal_distribution

logger = get_logger(__name__)

HEAVY_THRESHOLD = 2 / 3
TRANSPILE_TOL = 1e-10


def haar_su4(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(4): QR of a complex Ginibre matrix with the phase fix."""
    z = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
    q, r = linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q / np.linalg.det(q) ** 0.25


def qv_circuit(width: int, rng: np.random.Generator, depth: int | None = None) -> Circuit:
    """
    Model circuit: `depth` layers (default `width`) of a random qubit
    permutation followed by Haar SU(4) gates on consecutive pairs.
    """
    if width < 2:
        raise InputError("Quantum Volume needs at least 2 qubits")
    depth = width if depth is None else depth
    ops: list[Gate] = []
    for _ in range(depth):
        perm = rng.permutation(width)
        for k in range(width // 2):
            ops.append(raw(haar_su4(rng), int(perm[2 * k]), int(perm[2 * k + 1])))
    return Circuit(width, tuple(ops))


def heavy_outputs(probs: np.ndarray) -> np.ndarray:
    """Boolean mask of outcomes whose ideal probability exceeds the median."""
    return probs > np.median(probs)


def average_gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """F_avg(U, V) = (d + |Tr(U^dag V)|^2) / (d (d + 1))."""
    d = u.shape[0]
    overlap = abs(np.trace(u.conj().T @ v)) ** 2
    return float((d + overlap) / (d * (d + 1)))


def _routed_run(circuit: Circuit, graph: CouplingGraph, noise: NoiseModel) -> tuple[np.ndarray, float]:
    if graph.n_nodes != circuit.n_qubits:
        raise InputError(f"QV graph has {graph.n_nodes} nodes, circuit has {circuit.n_qubits} qubits")
    routed = route(circuit, graph)
    logical = apply_layout(routed.circuit.unitary(), routed.final_layout)
    infidelity = 1.0 - average_gate_fidelity(circuit.unitary(), logical)
    if infidelity > TRANSPILE_TOL:
        raise NumericalError(f"Routed QV circuit drifted from its model: 1 - F_avg = {infidelity:.3e}")
    return apply_layout(measured_distribution(routed.circuit, noise), routed.final_layout), infidelity


def heavy_output_probability(
    circuit: Circuit,
    noise: NoiseModel,
    rng: np.random.Generator,
    shots: int = 0,
    graph: CouplingGraph | None = None,
) -> tuple[float, float | None]:
    """
    h_U: measured weight on the heavy set of one model circuit.

    Returns:
        tuple: (h_U, 1 - F_avg of the routed circuit or None when not routed).
    """
    heavy = heavy_outputs(ideal_distribution(circuit))
    if graph is None:
        measured, infidelity = measured_distribution(circuit, noise), None
    else:
        measured, infidelity = _routed_run(circuit, graph, noise)
    if shots > 0:
        measured = rng.multinomial(shots, measured / measured.sum()) / shots
    return float(np.clip(measured[heavy].sum(), 0.0, 1.0)), infidelity


def qv_width(
    width: int,
    noise: NoiseModel,
    rng: np.random.Generator,
    circuits: int = 100,
    shots: int = 0,
    graph: CouplingGraph | None = None,
    threads: int | None = None,
) -> QVWidthResult:
    """Run `circuits` square model circuits of one width and apply the 2/3 rule."""

    def run(child: np.random.Generator) -> tuple[float, float | None]:
        return heavy_output_probability(qv_circuit(width, child), noise, child, shots, graph)

    children = rng.spawn(circuits)
    workers = max(1, threads or settings.THREADS)
    if workers == 1:
        outcomes = [run(c) for c in children]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, children))
    heavy = [h for h, _ in outcomes]
    infidelities = [f for _, f in outcomes if f is not None]
    mean = float(np.mean(heavy))
    passed = mean > HEAVY_THRESHOLD
    logger.info(f"QV width {width}: mean heavy-output probability {mean:.4f} ({'pass' if passed else 'fail'})")
    return QVWidthResult(
        width=width,
        depth=width,
        heavy_probabilities=heavy,
        mean_heavy_probability=mean,
        passed=passed,
        achieved_depth=width if passed else 0,
        max_infidelity=max(infidelities) if infidelities else None,
    )


def qv_run(
    max_width: int,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    circuits_per_width: int = 100,
    *,
    min_width: int = 2,
    shots: int = 0,
    graph_factory: Callable[[int], CouplingGraph] | None = None,
    threads: int | None = None,
) -> QVResult:
    """
    Quantum Volume from min_width upward until a width fails or max_width is reached.

    Args:
        max_width: Largest width tried.
        noise: Noise model; noiseless when omitted.
        rng: Master generator.
        circuits_per_width: Model circuits per width.
        min_width: First width.
        shots: Shots per circuit; 0 uses exact measured distributions.
        graph_factory: Width -> coupling graph; when given each circuit is routed
            and must stay equivalent to its model.
        threads: Worker count.

    Returns:
        QVResult: Per-width results and log2 V_Q = max_m min(m, d(m)).
    """
    if min_width < 2 or max_width < min_width:
        raise InputError(f"Invalid QV width range {min_width}..{max_width}")
    if max_width > settings.XEB_MAX_QUBITS:
        raise IdealSimulationBudgetError(max_width, settings.XEB_MAX_QUBITS)
    noise = noise or NoiseModel()
    rng = rng or np.random.default_rng(settings.SEED)
    widths: list[QVWidthResult] = []
    for width in range(min_width, max_width + 1):
        graph = graph_factory(width) if graph_factory else None
        result = qv_width(width, noise, rng, circuits_per_width, shots, graph, threads)
        widths.append(result)
        if not result.passed:
            break
    log2_volume = max((min(w.width, w.achieved_depth) for w in widths), default=0)
    return QVResult(widths=widths, log2_volume=log2_volume)
