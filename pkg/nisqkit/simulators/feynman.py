"""Schrodinger-Feynman amplitudes over a bipartition of the register.

Gates inside one half evolve that half's state vector. Each gate crossing the
cut is split by SVD into sum_s A_s (x) B_s, and every choice of terms is a path
whose amplitude is the product of the two half-amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, gate_matrix, permute_matrix
from nisqkit.core.config import settings
from nisqkit.core.errors import InputError, PathBudgetError, WidthMismatchError
from nisqkit.core.logging import get_logger
from nisqkit.simulators.statevector import StateVector, bits_to_index

logger = get_logger(__name__)

SCHMIDT_TOL = 1e-12


@dataclass(frozen=True)
class Bipartition:
    """Two disjoint qubit sets covering the register."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(self.a)), tuple(sorted(self.b))
        if not a or not b:
            raise InputError("Both halves of a bipartition need qubits")
        if set(a) & set(b):
            raise InputError(f"Bipartition halves overlap: {sorted(set(a) & set(b))}")
        if set(a) | set(b) != set(range(len(a) + len(b))):
            raise InputError("Bipartition must cover qubits 0..n-1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def split(cls, n_qubits: int, a: Sequence[int]) -> "Bipartition":
        return cls(tuple(a), tuple(q for q in range(n_qubits) if q not in set(a)))

    @property
    def n_qubits(self) -> int:
        return len(self.a) + len(self.b)

    def side(self, gate: Gate) -> str:
        """'a', 'b' or 'cross'."""
        in_a = [t in self.a for t in gate.targets]
        if all(in_a):
            return "a"
        if not any(in_a):
            return "b"
        return "cross"


def split_gate(matrix: np.ndarray, targets: Sequence[int], part: Bipartition):
    """
    Operator-Schmidt decomposition of a cross gate.

    Returns:
        tuple: (a_targets, b_targets, terms) with terms a list of (A_s, B_s)
            such that the gate equals sum_s A_s (x) B_s.
    """
    a_pos = [i for i, t in enumerate(targets) if t in part.a]
    b_pos = [i for i, t in enumerate(targets) if t in part.b]
    ka, kb = len(a_pos), len(b_pos)
    da, db = 1 << ka, 1 << kb
    u = permute_matrix(matrix, a_pos + b_pos).reshape(da, db, da, db)
    m = u.transpose(0, 2, 1, 3).reshape(da * da, db * db)
    left, s, right = np.linalg.svd(m)
    terms = []
    for k, value in enumerate(s):
        if value < SCHMIDT_TOL:
            continue
        root = np.sqrt(value)
        terms.append((root * left[:, k].reshape(da, da), root * right[k, :].reshape(db, db)))
    return [targets[i] for i in a_pos], [targets[i] for i in b_pos], terms


def count_paths(circuit: Circuit, part: Bipartition, params: Sequence[float] | None = None) -> int:
    """Product of the Schmidt ranks of all cross gates."""
    paths = 1
    for op in circuit.ops:
        if part.side(op) == "cross":
            paths *= len(split_gate(gate_matrix(op, params), op.targets, part)[2])
    return paths


def sf_amplitude(
    circuit: Circuit,
    bits: str,
    part: Bipartition,
    params: Sequence[float] | None = None,
    *,
    path_budget: int | None = None,
) -> complex:
    """
    <bits|C|0...0> by summing Schrodinger-Feynman paths.

    Args:
        circuit: Bound circuit (or params for its slots).
        bits: Output bitstring, qubit 0 first.
        part: Bipartition of the register.
        params: Parameter values.
        path_budget: Maximum path count; defaults to settings.SF_PATH_BUDGET.

    Returns:
        complex: The amplitude.
    """
    n = circuit.n_qubits
    if part.n_qubits != n:
        raise WidthMismatchError(f"Bipartition covers {part.n_qubits} qubits, circuit has {n}")
    bits_to_index(bits, n)
    budget = settings.SF_PATH_BUDGET if path_budget is None else path_budget

    local_a = {q: i for i, q in enumerate(part.a)}
    local_b = {q: i for i, q in enumerate(part.b)}
    steps = []
    paths = 1
    for op in circuit.ops:
        matrix = gate_matrix(op, params)
        side = part.side(op)
        if side == "a":
            steps.append(("a", matrix, [local_a[t] for t in op.targets]))
        elif side == "b":
            steps.append(("b", matrix, [local_b[t] for t in op.targets]))
        else:
            a_t, b_t, terms = split_gate(matrix, op.targets, part)
            paths *= len(terms)
            steps.append(("cross", terms, ([local_a[t] for t in a_t], [local_b[t] for t in b_t])))
    if paths > budget:
        raise PathBudgetError(paths, budget)
    logger.debug(f"Schrodinger-Feynman run over {paths} paths")

    index_a = bits_to_index("".join(bits[q] for q in part.a), len(part.a))
    index_b = bits_to_index("".join(bits[q] for q in part.b), len(part.b))

    def walk(step: int, psi_a: StateVector, psi_b: StateVector) -> complex:
        while step < len(steps):
            side, payload, targets = steps[step]
            step += 1
            if side == "a":
                psi_a.apply_matrix(payload, targets)
            elif side == "b":
                psi_b.apply_matrix(payload, targets)
            else:
                total = 0j
                for op_a, op_b in payload:
                    branch_a, branch_b = psi_a.copy(), psi_b.copy()
                    branch_a.apply_matrix(op_a, targets[0])
                    branch_b.apply_matrix(op_b, targets[1])
                    total += walk(step, branch_a, branch_b)
                return total
        return complex(psi_a.amplitudes[index_a] * psi_b.amplitudes[index_b])

    return walk(0, StateVector(len(part.a), dtype=np.complex128), StateVector(len(part.b), dtype=np.complex128))
