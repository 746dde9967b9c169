"""Exact PEPS simulator for small two-dimensional grids.

Site q = row * n_h + col holds a tensor of shape (2, left, right, up, down).
Two-qubit gates are split by SVD and the shared bond grows by the gate's
Schmidt rank; nothing is truncated.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, gate_matrix, permute_matrix
from nisqkit.core.config import settings
from nisqkit.core.errors import ContractionBudgetError, InputError, QubitIndexError, WidthMismatchError
from nisqkit.core.logging import get_logger
from nisqkit.simulators.statevector import bits_to_index

logger = get_logger(__name__)

SCHMIDT_TOL = 1e-12


def estimate_cost(n_h: int, n_v: int, bond: int) -> float:
    """Operation count (n_h-2)(n_v-2) D^(min(n_h,n_v)+3) of a direct contraction."""
    if n_h < 3 or n_v < 3:
        raise InputError("Cost formula needs both grid sides >= 3")
    return float((n_h - 2) * (n_v - 2)) * float(bond) ** (min(n_h, n_v) + 3)


def gate_schmidt_split(matrix: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a 4x4 gate into sum_k U_k (x) V_k with sqrt(s_k) absorbed on both sides."""
    m = matrix.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    left, s, right = np.linalg.svd(m)
    terms = []
    for k, value in enumerate(s):
        if value < SCHMIDT_TOL:
            continue
        root = np.sqrt(value)
        terms.append((root * left[:, k].reshape(2, 2), root * right[k, :].reshape(2, 2)))
    return terms


class PEPSState:
    def __init__(self, n_h: int, n_v: int, cost_budget: float | None = None):
        if n_h < 2 or n_v < 2:
            raise InputError(f"PEPS grid must be at least 2x2, got {n_h}x{n_v}")
        self.n_h = n_h
        self.n_v = n_v
        self.cost_budget = settings.PEPS_COST_BUDGET if cost_budget is None else cost_budget
        zero = np.zeros((2, 1, 1, 1, 1), dtype=complex)
        zero[0] = 1
        self.tensors: list[np.ndarray] = [zero.copy() for _ in range(n_h * n_v)]

    @property
    def n_qubits(self) -> int:
        return self.n_h * self.n_v

    def site(self, q: int) -> tuple[int, int]:
        """(row, col) of a qubit."""
        if not 0 <= q < self.n_qubits:
            raise QubitIndexError(f"Qubit {q} outside a {self.n_h}x{self.n_v} grid")
        return divmod(q, self.n_h)

    def max_bond(self) -> int:
        return max(max(t.shape[1:]) for t in self.tensors)

    def bond(self, a: int, b: int) -> int:
        """Size of the bond between two adjacent sites."""
        (ra, ca), (rb, cb) = self.site(a), self.site(b)
        if ra == rb and cb == ca + 1:
            return self.tensors[a].shape[2]
        if ra == rb and ca == cb + 1:
            return self.tensors[a].shape[1]
        if ca == cb and rb == ra + 1:
            return self.tensors[a].shape[4]
        if ca == cb and ra == rb + 1:
            return self.tensors[a].shape[3]
        raise InputError(f"Sites {a} and {b} are not adjacent")

    def memory(self) -> int:
        """Number of stored complex numbers."""
        return sum(t.size for t in self.tensors)

    def check_budget(self, bond: int | None = None) -> None:
        if min(self.n_h, self.n_v) < 3:
            return
        cost = estimate_cost(self.n_h, self.n_v, bond or self.max_bond())
        if cost > self.cost_budget:
            raise ContractionBudgetError(f"Contraction cost {cost:.3e} exceeds budget {self.cost_budget:.3e}")

    def apply_1q(self, matrix: np.ndarray, q: int) -> None:
        self.site(q)
        self.tensors[q] = np.einsum("ts,slrud->tlrud", matrix, self.tensors[q])

    def apply_2q(self, matrix: np.ndarray, a: int, b: int) -> int:
        """
        Exact two-qubit update on adjacent sites.

        Args:
            matrix: 4x4 gate with site a as the most significant bit.
            a: First target.
            b: Second target.

        Returns:
            int: Schmidt rank chi the shared bond was multiplied by.
        """
        (ra, ca), (rb, cb) = self.site(a), self.site(b)
        if (ra, ca) > (rb, cb):
            return self.apply_2q(permute_matrix(matrix, [1, 0]), b, a)
        horizontal = ra == rb and cb == ca + 1
        vertical = ca == cb and rb == ra + 1
        if not (horizontal or vertical):
            raise InputError(f"Sites {a} and {b} are not adjacent on the grid")
        terms = gate_schmidt_split(matrix)
        chi = len(terms)
        self.check_budget(max(self.max_bond(), self.bond(a, b) * chi))
        u = np.stack([t[0] for t in terms])
        v = np.stack([t[1] for t in terms])
        ta, tb = self.tensors[a], self.tensors[b]
        if horizontal:
            new_a = np.einsum("kts,slrud->tlrkud", u, ta)
            new_b = np.einsum("kts,slrud->tlkrud", v, tb)
            sa, sb = new_a.shape, new_b.shape
            self.tensors[a] = new_a.reshape(sa[0], sa[1], sa[2] * chi, sa[4], sa[5])
            self.tensors[b] = new_b.reshape(sb[0], sb[1] * chi, sb[3], sb[4], sb[5])
        else:
            new_a = np.einsum("kts,slrud->tlrudk", u, ta)
            new_b = np.einsum("kts,slrud->tlrukd", v, tb)
            sa, sb = new_a.shape, new_b.shape
            self.tensors[a] = new_a.reshape(sa[0], sa[1], sa[2], sa[3], sa[4] * chi)
            self.tensors[b] = new_b.reshape(sb[0], sb[1], sb[2], sb[3] * chi, sb[5])
        logger.debug(f"Bond ({a},{b}) grew by chi={chi} to {self.bond(a, b)}")
        return chi

    def apply_gate(self, gate: Gate, params: Sequence[float] | None = None) -> None:
        matrix = gate_matrix(gate, params)
        if gate.arity == 1:
            self.apply_1q(matrix, gate.targets[0])
        elif gate.arity == 2:
            self.apply_2q(matrix, *gate.targets)
        else:
            raise InputError(f"PEPS simulator supports one- and two-qubit gates, got {gate!r}")

    def apply_circuit(self, circuit: Circuit, params: Sequence[float] | None = None) -> "PEPSState":
        if circuit.n_qubits != self.n_qubits:
            raise WidthMismatchError(f"Circuit has {circuit.n_qubits} qubits, grid has {self.n_qubits}")
        for op in circuit.ops:
            self.apply_gate(op, params)
        return self

    def _projected_grid(self, bits: str) -> list[list[np.ndarray]]:
        bits_to_index(bits, self.n_qubits)
        return [
            [self.tensors[r * self.n_h + c][int(bits[r * self.n_h + c])] for c in range(self.n_h)]
            for r in range(self.n_v)
        ]

    def amplitude(self, bits: str, order: str = "column") -> complex:
        """
        <bits|psi> by exact boundary contraction.

        Args:
            bits: Output bitstring, qubit 0 first.
            order: "column" (default) or "row".
        """
        self.check_budget()
        grid = self._projected_grid(bits)
        if order == "column":
            return _contract_columns(grid)
        if order == "row":
            transposed = [
                [grid[r][c].transpose(2, 3, 0, 1) for r in range(self.n_v)] for c in range(self.n_h)
            ]
            return _contract_columns(transposed)
        raise InputError(f"Unknown contraction order '{order}'")

    def __repr__(self) -> str:
        return f"PEPSState({self.n_h}x{self.n_v}, max_bond={self.max_bond()})"


def _contract_columns(grid: list[list[np.ndarray]]) -> complex:
    """Contract a grid of (left, right, up, down) tensors one column at a time."""
    rows, cols = len(grid), len(grid[0])
    boundary = np.ones((1,) * rows, dtype=complex)
    for c in range(cols):
        boundary = boundary[..., None]
        for r in range(rows):
            t = grid[r][c]
            boundary = np.tensordot(boundary, t, axes=([r, boundary.ndim - 1], [0, 2]))
            boundary = np.moveaxis(boundary, -2, r)
        boundary = boundary[..., 0]
    return complex(boundary.reshape(-1)[0])


def init_zero_grid(n_h: int, n_v: int, cost_budget: float | None = None) -> PEPSState:
    return PEPSState(n_h, n_v, cost_budget)
