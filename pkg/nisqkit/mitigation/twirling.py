"""Pauli twirling (randomized compiling) of two-qubit Clifford gates."""

from __future__ import annotations

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, pauli_gate
from nisqkit.circuits.pauli import all_pauli_words, pauli_apply_conjugation, words_commute
from nisqkit.core.errors import InputError, NonCliffordError, ParameterError
from nisqkit.core.logging import get_logger
from nisqkit.noise.channels import Channel, pauli_transfer_matrix

logger = get_logger(__name__)


def twirl_frames(gate: Gate) -> list[tuple[str, str]]:
    """
    Every (before, after) Pauli pair with after . G . before = G up to phase.

    Words are over the gate's targets in target order.
    """
    if gate.arity != 2:
        raise InputError(f"Twirl frames are defined for two-qubit gates, got {gate!r}")
    local = gate.with_targets((0, 1))
    frames = []
    for word in all_pauli_words(2):
        try:
            image = pauli_apply_conjugation(word, local)
        except NonCliffordError as e:
            raise NonCliffordError(f"Cannot twirl non-Clifford gate {gate!r}: {str(e)}") from e
        frames.append((word, image.letters))
    return frames


def _pauli_layer(word: str, targets: tuple[int, ...]) -> list[Gate]:
    return [pauli_gate(c, q) for c, q in zip(word, targets) if c != "I"]


def pauli_twirl(circuit: Circuit, rng: np.random.Generator, merge: bool = True) -> Circuit:
    """
    Sandwich every two-qubit gate between a random Pauli pair and its compensation.

    Args:
        circuit: Bound circuit whose two-qubit gates are Clifford.
        rng: Frame generator.
        merge: Fuse the inserted Paulis into neighbouring single-qubit gates.

    Returns:
        Circuit: Logically equivalent circuit up to global phase.
    """
    if not circuit.is_bound:
        raise ParameterError("Twirling needs a bound circuit")
    tables: dict[tuple, list[tuple[str, str]]] = {}
    ops: list[Gate] = []
    for op in circuit.ops:
        if op.arity != 2:
            ops.append(op)
            continue
        key = (op.kind, None if op.matrix is None else op.matrix.tobytes())
        if key not in tables:
            tables[key] = twirl_frames(op)
        before, after = tables[key][int(rng.integers(16))]
        ops += _pauli_layer(before, op.targets) + [op] + _pauli_layer(after, op.targets)
    twirled = circuit.with_ops(ops)
    if merge:
        from nisqkit.compiler.fusion import fuse_gates

        twirled = fuse_gates(twirled, absorb=False)
    return twirled


def averaged_ptm(channel: Channel, rng: np.random.Generator | None = None, samples: int | None = None) -> np.ndarray:
    """
    Pauli-transfer matrix of a channel averaged over Pauli conjugations Q E Q.

    Conjugation multiplies R[i, j] by s(Q, i) s(Q, j), s = +1 for commuting words.
    With rng=None every frame is enumerated and the result is diagonal.
    """
    k = channel.arity
    words = all_pauli_words(k)
    signs = np.array([[1.0 if words_commute(q, w) else -1.0 for w in words] for q in words])
    if rng is None:
        chosen = np.arange(len(words))
    else:
        if not samples or samples < 1:
            raise InputError("Sampled twirl needs a positive sample count")
        chosen = rng.integers(len(words), size=samples)
    ptm = pauli_transfer_matrix(channel)
    total = np.zeros_like(ptm)
    for q in chosen:
        total += np.outer(signs[q], signs[q]) * ptm
    return total / len(chosen)
