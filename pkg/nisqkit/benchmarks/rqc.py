"""Random quantum circuits on rectangular grids and the linear XEB fidelity."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.benchmarks.xeb import half_pi_rotation
from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import Gate, cz, raw, rx, ry
from nisqkit.core.errors import InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import LinearXEBResult
from nisqkit.simulators.statevector import bits_to_index
from nisqkit.utils.cache import ideal_distribution

logger = get_logger(__name__)

PATTERN_SEQUENCE = "ABCDCDAB"
SQRT_W = half_pi_rotation(np.pi / 4)


def _single_qubit(choice: int, q: int) -> Gate:
    if choice == 0:
        return rx(np.pi / 2, q)
    if choice == 1:
        return ry(np.pi / 2, q)
    return raw(SQRT_W, q)


def grid_pattern(n_h: int, n_v: int, label: str) -> list[tuple[int, int]]:
    """
    Coupler set of one pattern on an n_h x n_v grid (node = row * n_h + col).

    A and B are horizontal couplers starting in even and odd columns; C and D
    are vertical couplers starting in even and odd rows.
    """
    pairs = []
    if label in "AB":
        parity = 0 if label == "A" else 1
        for r in range(n_v):
            for c in range(parity, n_h - 1, 2):
                pairs.append((r * n_h + c, r * n_h + c + 1))
    elif label in "CD":
        parity = 0 if label == "C" else 1
        for r in range(parity, n_v - 1, 2):
            for c in range(n_h):
                pairs.append((r * n_h + c, (r + 1) * n_h + c))
    else:
        raise InputError(f"Unknown coupler pattern '{label}'")
    return pairs


def rqc_generate(
    n_h: int,
    n_v: int,
    cycles: int,
    rng: np.random.Generator,
    graph: CouplingGraph | None = None,
) -> Circuit:
    """
    Random circuit of `cycles` (single-qubit layer, CZ pattern layer) plus a final layer.

    Single-qubit gates are drawn from sqrt(X), sqrt(Y), sqrt(W) without repeating
    the gate the same qubit received in the previous layer. Two-qubit layers
    follow the pattern sequence ABCDCDAB.

    Args:
        n_h: Grid columns.
        n_v: Grid rows.
        cycles: Number of cycles m.
        rng: Generator.
        graph: Device graph the pattern couplers must lie on; the full grid by default.
    """
    if n_h < 1 or n_v < 1 or cycles < 0:
        raise InputError(f"Invalid RQC shape {n_h}x{n_v} with {cycles} cycles")
    n = n_h * n_v
    if graph is not None:
        if graph.n_nodes < n:
            raise InputError(f"Grid of {n} qubits does not fit a {graph.n_nodes}-node graph")
        for label in "ABCD":
            missing = [e for e in grid_pattern(n_h, n_v, label) if not graph.are_adjacent(*e)]
            if missing:
                raise InputError(f"Pattern {label} couplers {missing} are not graph edges")
    previous = [-1] * n
    ops: list[Gate] = []

    def layer() -> None:
        for q in range(n):
            options = [g for g in range(3) if g != previous[q]]
            choice = options[int(rng.integers(len(options)))]
            previous[q] = choice
            ops.append(_single_qubit(choice, q))

    for cycle in range(cycles):
        layer()
        ops.extend(cz(a, b) for a, b in grid_pattern(n_h, n_v, PATTERN_SEQUENCE[cycle % len(PATTERN_SEQUENCE)]))
    layer()
    return Circuit(n, tuple(ops))


def linear_xeb_fidelity(
    circuit: Circuit, samples: Sequence[str], params: Sequence[float] | None = None
) -> LinearXEBResult:
    """
    F = 2^n <p(x_i)> - 1 over the samples, with its standard error.

    Raises:
        IdealSimulationBudgetError: The circuit is too wide for ideal probabilities.
    """
    if not samples:
        raise InputError("Linear XEB needs at least one sample")
    probs = ideal_distribution(circuit.bind(params))
    n = circuit.n_qubits
    values = np.array([probs[bits_to_index(bits, n)] for bits in samples]) * (1 << n)
    stderr = float(values.std(ddof=1) / np.sqrt(len(values))) if len(values) > 1 else 0.0
    fidelity = float(values.mean() - 1.0)
    logger.debug(f"Linear XEB over {len(values)} samples: {fidelity:.4f} +/- {stderr:.4f}")
    return LinearXEBResult(fidelity=fidelity, stderr=stderr, samples=len(values))
