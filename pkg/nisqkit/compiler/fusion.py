from __future__ import annotations

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, gate_matrix, raw
from nisqkit.core.errors import ParameterError
from nisqkit.core.logging import get_logger

logger = get_logger(__name__)

IDENTITY_TOL = 1e-10


def _is_identity(matrix: np.ndarray) -> bool:
    """Identity up to global phase."""
    return abs(abs(np.trace(matrix)) / matrix.shape[0] - 1) < IDENTITY_TOL


def fuse_gates(circuit: Circuit, absorb: bool = True) -> Circuit:
    """
    Merge adjacent single-qubit gates.

    Each maximal run of single-qubit gates on one qubit becomes one raw gate, or
    disappears when it is the identity up to phase; a lone gate is kept as is.
    With absorb=True, a pending run in front of a two-qubit gate is folded into
    that gate's matrix. The pass is idempotent and preserves the unitary.

    Args:
        circuit: Bound circuit.
        absorb: Fold single-qubit runs into the following two-qubit gate.

    Returns:
        Circuit: Fused circuit.
    """
    if not circuit.is_bound:
        raise ParameterError("Gate fusion needs a bound circuit")
    pending: dict[int, list[Gate]] = {}
    ops: list[Gate] = []

    def merged(run: list[Gate]) -> np.ndarray:
        m = np.eye(2, dtype=complex)
        for g in run:
            m = gate_matrix(g) @ m
        return m

    def flush(q: int) -> None:
        run = pending.pop(q, [])
        if not run:
            return
        m = merged(run)
        if _is_identity(m):
            return
        ops.append(run[0] if len(run) == 1 else raw(m, q))

    for op in circuit.ops:
        if op.arity == 1:
            pending.setdefault(op.targets[0], []).append(op)
            continue
        if absorb and op.arity == 2 and any(pending.get(q) for q in op.targets):
            a, b = op.targets
            local = np.kron(merged(pending.pop(a, [])), merged(pending.pop(b, [])))
            ops.append(raw(gate_matrix(op) @ local, a, b))
            continue
        for q in op.targets:
            flush(q)
        ops.append(op)
    for q in sorted(pending):
        flush(q)
    logger.debug(f"Fusion: {len(circuit)} -> {len(ops)} gates")
    return circuit.with_ops(ops)
