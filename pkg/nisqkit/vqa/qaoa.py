"""QAOA for MaxCut."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import networkx as nx
import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, GateKind, Parameter, cx, h
from nisqkit.circuits.pauli import Observable, PauliString
from nisqkit.core.errors import InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.vqa import OptimizerConfig, QAOAResult
from nisqkit.simulators.statevector import simulate
from nisqkit.vqa.loss import LossSpec, loss
from nisqkit.vqa.optimizer import optimize

logger = get_logger(__name__)

EXHAUSTIVE_LIMIT = 20
GRID_POINTS = 12


@dataclass(frozen=True)
class MaxCutProblem:
    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        for a, b in self.edges:
            if a == b or not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
                raise InputError(f"Invalid edge ({a}, {b}) for {self.n_nodes} vertices")
            if graph.has_edge(a, b):
                raise InputError(f"Duplicate edge ({a}, {b})")
            graph.add_edge(a, b)
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    @classmethod
    def from_text(cls, text: str) -> "MaxCutProblem":
        """Edge list, one `i j` pair per line; `#` and `//` start comments."""
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].split("//", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError(f"Expected 'i j' on line {lineno}: {raw!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError as e:
                raise InputError(f"Bad vertex on line {lineno}: {raw!r}") from e
        if not edges:
            raise InputError("Edge list is empty")
        return cls(1 + max(max(e) for e in edges), tuple(edges))

    def cost_hamiltonian(self) -> Observable:
        """H_C = sum over edges of (1 - Z_j Z_k) / 2."""
        terms = [PauliString("I" * self.n_nodes, 0.5 * len(self.edges))]
        for a, b in self.edges:
            letters = ["I"] * self.n_nodes
            letters[a] = letters[b] = "Z"
            terms.append(PauliString("".join(letters), -0.5))
        return Observable(tuple(terms))

    def cut_value(self, bits: str) -> int:
        return sum(1 for a, b in self.edges if bits[a] != bits[b])

    def max_cut(self) -> int | None:
        if self.n_nodes > EXHAUSTIVE_LIMIT:
            return None
        return max(self.cut_value("".join(b)) for b in product("01", repeat=self.n_nodes))


def qaoa_circuit(problem: MaxCutProblem, p: int) -> Circuit:
    """
    |+>^n followed by p rounds of exp(-i gamma H_C) and exp(-i beta H_M).

    Slots are [gamma_0..gamma_{p-1}, beta_0..beta_{p-1}]. Each edge term is
    CX Rz(-gamma) CX, equal to exp(-i gamma (1 - ZZ)/2) up to global phase;
    the mixer is Rx(2 beta) on every qubit.
    """
    if p < 1:
        raise InputError("QAOA needs p >= 1")
    n = problem.n_nodes
    ops: list[Gate] = [h(q) for q in range(n)]
    names = [f"gamma{l}" for l in range(p)] + [f"beta{l}" for l in range(p)]
    for layer in range(p):
        gamma = Parameter(layer, names[layer], -1.0)
        beta = Parameter(p + layer, names[p + layer], 2.0)
        for a, b in problem.edges:
            ops += [cx(a, b), Gate(GateKind.RZ, (b,), gamma), cx(a, b)]
        ops += [Gate(GateKind.RX, (q,), beta) for q in range(n)]
    return Circuit(n, tuple(ops), 2 * p, tuple(names))


def _initial_angles(spec: LossSpec, p: int) -> np.ndarray:
    """Grid search for p = 1, then a linear ramp of the best angles over the layers."""
    best, best_value = None, np.inf
    for gamma in np.linspace(0, np.pi, GRID_POINTS, endpoint=False)[1:]:
        for beta in np.linspace(0, np.pi / 2, GRID_POINTS, endpoint=False)[1:]:
            theta = np.array([gamma] * p + [beta] * p)
            if p > 1:
                ramp = (np.arange(p) + 1) / p
                theta = np.concatenate([gamma * ramp, beta * ramp[::-1]])
            value = loss(spec, theta)
            if value < best_value:
                best, best_value = theta, value
    logger.debug(f"QAOA start {best.tolist()} with <H_C> = {-best_value:.6f}")
    return best


def qaoa_maxcut(
    problem: MaxCutProblem,
    p: int,
    config: OptimizerConfig | None = None,
    rng: np.random.Generator | None = None,
    shots: int = 1000,
) -> QAOAResult:
    """
    Optimize QAOA angles for MaxCut and sample candidate cuts.

    Args:
        problem: Graph to cut.
        p: Number of QAOA rounds.
        config: Gradient-descent settings.
        rng: Sampling generator.
        shots: Samples drawn from the optimized state.

    Returns:
        QAOAResult: Angles, expected cut, best sampled bitstring and the trace.
    """
    config = config or OptimizerConfig(method="adjoint", step_size=0.05, max_iterations=300, tolerance=1e-9)
    rng = rng or np.random.default_rng()
    hc = problem.cost_hamiltonian()
    negated = Observable(tuple(PauliString(t.letters, -t.coefficient) for t in hc.terms))
    circuit = qaoa_circuit(problem, p)
    spec = LossSpec(circuit, negated)
    trace = optimize(spec, _initial_angles(spec, p), config)
    theta = np.array(trace.final.params)
    state = simulate(circuit.bind(theta))
    samples = state.sample(shots, rng)
    best = max(samples, key=lambda b: (problem.cut_value(b), b))
    expected = state.expectation(hc)
    logger.info(f"QAOA p={p}: <H_C> = {expected:.6f}, best sampled cut {problem.cut_value(best)}")
    return QAOAResult(
        gammas=theta[:p].tolist(),
        betas=theta[p:].tolist(),
        expected_cut=expected,
        best_bitstring=best,
        best_cut=problem.cut_value(best),
        max_cut=problem.max_cut(),
        trace=trace,
    )
