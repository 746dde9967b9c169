from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import Gate, GateKind, Parameter, cx
from nisqkit.core.errors import InputError

_AXES = {"rx": GateKind.RX, "ry": GateKind.RY, "rz": GateKind.RZ}


def hardware_efficient_ansatz(
    n_qubits: int,
    layers: int,
    rotations: Sequence[str] = ("ry", "rz"),
    graph: CouplingGraph | None = None,
) -> Circuit:
    """
    Layers of trainable single-qubit rotations followed by a CX entangler.

    Args:
        n_qubits: Register width.
        layers: Number of rotation + entangler layers.
        rotations: Rotation axes applied to every qubit in each layer.
        graph: Entangler pattern; defaults to a line.

    Returns:
        Circuit: n_qubits * layers * len(rotations) parameter slots.
    """
    if layers < 1:
        raise InputError("Ansatz needs at least one layer")
    try:
        kinds = [_AXES[r.lower()] for r in rotations]
    except KeyError as e:
        raise InputError(f"Unknown rotation axis {e}") from e
    graph = graph or (CouplingGraph.line(n_qubits) if n_qubits > 1 else None)
    ops: list[Gate] = []
    slot = 0
    for layer in range(layers):
        for q in range(n_qubits):
            for kind in kinds:
                ops.append(Gate(kind, (q,), Parameter(slot, f"theta{slot}")))
                slot += 1
        if graph is not None:
            ops.extend(cx(a, b) for a, b in graph.edges)
    return Circuit(n_qubits, tuple(ops), slot)


def random_parametric_circuit(
    n_qubits: int, n_params: int, n_gates: int, rng: np.random.Generator
) -> Circuit:
    """
    Random circuit mixing fixed gates with rotations on `n_params` slots.

    Every slot appears at least once; later rotations reuse random slots with
    scale +-1 or 2.
    """
    if n_params < 1 or n_gates < n_params:
        raise InputError(f"Need n_gates >= n_params >= 1, got {n_gates} and {n_params}")
    fixed_1q = (GateKind.H, GateKind.S, GateKind.T, GateKind.X)
    rotations = (GateKind.RX, GateKind.RY, GateKind.RZ)
    slots = list(range(n_params)) + [None] * (n_gates - n_params)
    rng.shuffle(slots)
    ops: list[Gate] = []
    for slot in slots:
        q = int(rng.integers(n_qubits))
        if slot is not None or rng.random() < 0.4:
            index = int(rng.integers(n_params)) if slot is None else slot
            scale = float(rng.choice([1.0, -1.0, 2.0]))
            ops.append(Gate(rotations[int(rng.integers(3))], (q,), Parameter(index, f"theta{index}", scale)))
        elif n_qubits > 1 and rng.random() < 0.5:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            ops.append(Gate(GateKind.CX if rng.random() < 0.5 else GateKind.CZ, (int(a), int(b))))
        else:
            ops.append(Gate(fixed_1q[int(rng.integers(len(fixed_1q)))], (q,)))
    return Circuit(n_qubits, tuple(ops), n_params)
