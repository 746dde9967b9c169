"""Greedy SWAP insertion onto a coupling graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.gates import Gate, swap
from nisqkit.core.errors import InputError, QubitIndexError
from nisqkit.core.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Layout:
    """Bijection logical qubit l -> physical node physical[l]."""

    physical: tuple[int, ...]

    def __post_init__(self):
        physical = tuple(int(p) for p in self.physical)
        if sorted(physical) != list(range(len(physical))):
            raise InputError(f"Layout {physical} is not a permutation")
        object.__setattr__(self, "physical", physical)

    @classmethod
    def identity(cls, n: int) -> "Layout":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.physical)

    def __getitem__(self, logical: int) -> int:
        return self.physical[logical]

    def inverse(self) -> tuple[int, ...]:
        """physical node -> logical qubit."""
        out = [0] * len(self.physical)
        for logical, p in enumerate(self.physical):
            out[p] = logical
        return tuple(out)

    def swapped(self, a: int, b: int) -> "Layout":
        """Layout after exchanging the contents of physical nodes a and b."""
        physical = list(self.physical)
        inv = self.inverse()
        physical[inv[a]], physical[inv[b]] = b, a
        return Layout(tuple(physical))


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    initial_layout: Layout
    final_layout: Layout
    swaps: int


def apply_layout(values: np.ndarray, layout: Layout) -> np.ndarray:
    """
    Reorder an array indexed by physical basis states into logical order.

    Works on state vectors, distributions and unitaries (axis 0 is reindexed).
    """
    values = np.asarray(values)
    n = len(layout)
    if values.shape[0] != 1 << n:
        raise InputError(f"Leading dimension {values.shape[0]} does not match a {n}-qubit layout")
    rest = values.shape[1:]
    t = values.reshape([2] * n + list(rest))
    axes = list(layout.physical) + list(range(n, n + len(rest)))
    return t.transpose(axes).reshape(values.shape)


def apply_layout_bits(bits: str, layout: Layout) -> str:
    return "".join(bits[p] for p in layout.physical)


def route(
    circuit: Circuit,
    graph: CouplingGraph,
    initial: Layout | None = None,
    lookahead: float = 0.0,
) -> RoutedCircuit:
    """
    Insert SWAPs until every two-qubit gate acts on a coupling edge.

    Executable gates of the front layer are emitted first. When none is left,
    the SWAP on an edge touching a front-layer qubit that minimizes the sum of
    front-layer distances (plus `lookahead` times the mean distance of the next
    layer) is applied, ties going to the lowest edge index. A SWAP that does not
    strictly reduce the sum switches to moving the oldest front gate along a
    shortest path until some gate executes.

    Args:
        circuit: Circuit of one- and two-qubit gates.
        graph: Connected device graph with at least circuit.n_qubits nodes.
        initial: Starting layout; identity by default.
        lookahead: Weight of the next-layer term.

    Returns:
        RoutedCircuit: Circuit on physical nodes plus the final layout.
    """
    n = graph.n_nodes
    if circuit.n_qubits > n:
        raise QubitIndexError(f"Circuit has {circuit.n_qubits} qubits, graph has {n} nodes")
    if any(op.arity > 2 for op in circuit.ops):
        raise InputError("Routing supports one- and two-qubit gates; decompose wider gates first")
    layout = initial or Layout.identity(n)
    if len(layout) != n:
        raise InputError(f"Layout covers {len(layout)} qubits, graph has {n} nodes")
    initial = layout
    dist = graph.distance
    edges = list(graph.edges)
    ops = list(circuit.ops)
    queues: list[deque[int]] = [deque() for _ in range(n)]
    for k, op in enumerate(ops):
        for q in op.targets:
            queues[q].append(k)

    def front() -> list[int]:
        heads = {queues[q][0] for q in range(n) if queues[q]}
        return sorted(k for k in heads if all(queues[q][0] == k for q in ops[k].targets))

    def next_layer(front_gates: Sequence[int]) -> list[int]:
        out = set()
        for k in front_gates:
            for q in ops[k].targets:
                if len(queues[q]) > 1 and ops[queues[q][1]].arity == 2:
                    out.add(queues[q][1])
        return sorted(out)

    def cost(gates: Sequence[int], lay: Layout) -> float:
        return float(sum(dist[lay[ops[k].targets[0]], lay[ops[k].targets[1]]] for k in gates))

    out: list[Gate] = []
    swaps = 0
    fallback = False
    remaining = len(ops)
    while remaining:
        progressed = True
        while progressed:
            progressed = False
            for k in front():
                op = ops[k]
                phys = [layout[q] for q in op.targets]
                if op.arity == 2 and not graph.are_adjacent(*phys):
                    continue
                out.append(op.with_targets(phys))
                for q in op.targets:
                    queues[q].popleft()
                remaining -= 1
                progressed = True
                fallback = False
        if not remaining:
            break
        blocked = front()
        current = cost(blocked, layout)
        chosen = None
        if not fallback:
            upcoming = next_layer(blocked)
            touched = {layout[q] for k in blocked for q in ops[k].targets}
            best = None
            for index, (a, b) in enumerate(edges):
                if a not in touched and b not in touched:
                    continue
                trial = layout.swapped(a, b)
                score = cost(blocked, trial)
                if lookahead and upcoming:
                    score += lookahead * cost(upcoming, trial) / len(upcoming)
                if best is None or score < best[0] - 1e-12:
                    best = (score, index, cost(blocked, trial))
            if best is not None and best[2] < current:
                chosen = edges[best[1]]
            else:
                fallback = True
        if chosen is None:
            a, b = ops[blocked[0]].targets
            path = graph.shortest_path(layout[a], layout[b])
            chosen = (path[0], path[1])
            logger.debug(f"Routing fallback: moving {ops[blocked[0]]!r} along {path}")
        out.append(swap(*chosen))
        layout = layout.swapped(*chosen)
        swaps += 1
    routed = Circuit(n, tuple(out), circuit.n_params, circuit.param_names)
    logger.info(f"Routed {len(circuit)} gates with {swaps} SWAPs")
    return RoutedCircuit(routed, initial, layout, swaps)
