"""CNOT circuits as invertible matrices over GF(2)."""

from __future__ import annotations

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import GateKind, cx
from nisqkit.core.errors import InputError

F2Matrix = np.ndarray


def _as_f2(matrix) -> F2Matrix:
    m = np.asarray(matrix, dtype=np.uint8) & 1
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"GF(2) matrix must be square, got shape {m.shape}")
    return m


def gf2_matmul(a, b) -> F2Matrix:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % 2).astype(np.uint8)


def gf2_rank(matrix) -> int:
    m = _as_f2(matrix).copy()
    rank = 0
    for col in range(m.shape[1]):
        rows = np.flatnonzero(m[rank:, col]) + rank
        if rows.size == 0:
            continue
        m[[rank, rows[0]]] = m[[rows[0], rank]]
        for r in np.flatnonzero(m[:, col]):
            if r != rank:
                m[r] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


def random_invertible(n: int, rng: np.random.Generator) -> F2Matrix:
    """Uniform invertible n x n matrix by rejection."""
    while True:
        m = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if gf2_rank(m) == n:
            return m


def cnot_to_matrix(circuit: Circuit) -> F2Matrix:
    """
    Linear map x -> M x of a CNOT-only circuit.

    CX(c, t) adds row c to row t, applied in gate order.
    """
    m = np.eye(circuit.n_qubits, dtype=np.uint8)
    for op in circuit.ops:
        if op.kind is not GateKind.CX:
            raise InputError(f"CNOT circuit expected, found {op!r}")
        control, target = op.targets
        m[target] ^= m[control]
    return m


def matrix_to_cnot(matrix) -> Circuit:
    """
    CNOT circuit realizing an invertible GF(2) matrix by Gaussian elimination.

    Uses at most n^2 gates.

    Raises:
        InputError: The matrix is singular.
    """
    m = _as_f2(matrix).copy()
    n = m.shape[0]
    moves: list[tuple[int, int]] = []

    def add_row(src: int, dst: int) -> None:
        m[dst] ^= m[src]
        moves.append((src, dst))

    for col in range(n):
        if not m[col, col]:
            below = np.flatnonzero(m[col + 1:, col])
            if below.size == 0:
                raise InputError("Matrix is singular over GF(2)")
            add_row(int(below[0]) + col + 1, col)
        for r in np.flatnonzero(m[:, col]):
            if r != col:
                add_row(col, int(r))
    # Row operations reduce M to I, so M is their product in reverse order.
    return Circuit(n, tuple(cx(src, dst) for src, dst in reversed(moves)))
