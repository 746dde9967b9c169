from functools import reduce

import numpy as np
import pytest

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, GateKind, gate_matrix

ONE_QUBIT = (GateKind.H, GateKind.S, GateKind.T, GateKind.X, GateKind.Y, GateKind.Z, GateKind.SDG)
ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)
TWO_QUBIT = (GateKind.CX, GateKind.CZ, GateKind.SWAP)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_circuit(
    n_qubits: int,
    depth: int,
    rng: np.random.Generator,
    two_qubit: float = 0.4,
    nearest_neighbor: bool = False,
) -> Circuit:
    """Bound random circuit over the named gate set."""
    ops = []
    for _ in range(depth):
        if n_qubits > 1 and rng.random() < two_qubit:
            if nearest_neighbor:
                a = int(rng.integers(n_qubits - 1))
                pair = (a, a + 1) if rng.random() < 0.5 else (a + 1, a)
            else:
                pair = tuple(int(q) for q in rng.choice(n_qubits, size=2, replace=False))
            ops.append(Gate(TWO_QUBIT[int(rng.integers(len(TWO_QUBIT)))], pair))
        elif rng.random() < 0.5:
            kind = ROTATIONS[int(rng.integers(3))]
            ops.append(Gate(kind, (int(rng.integers(n_qubits)),), float(rng.uniform(-np.pi, np.pi))))
        else:
            ops.append(Gate(ONE_QUBIT[int(rng.integers(len(ONE_QUBIT)))], (int(rng.integers(n_qubits)),)))
    return Circuit(n_qubits, tuple(ops))


def embed(matrix: np.ndarray, targets, n_qubits: int) -> np.ndarray:
    """Full 2^n operator of a gate matrix, built by Kronecker products and a permutation."""
    k = len(targets)
    rest = [q for q in range(n_qubits) if q not in targets]
    full = np.kron(matrix, np.eye(1 << len(rest)))
    # full acts on qubit order targets + rest; permute basis back to 0..n-1.
    order = list(targets) + rest
    dim = 1 << n_qubits
    perm = np.empty(dim, dtype=int)
    for i in range(dim):
        bits = [(i >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        j = 0
        for q in order:
            j = (j << 1) | bits[q]
        perm[i] = j
    return full[np.ix_(perm, perm)]


def kron_unitary(circuit: Circuit, params=None) -> np.ndarray:
    """Dense oracle: product of embedded gate matrices."""
    n = circuit.n_qubits
    mats = [embed(gate_matrix(op, params), op.targets, n) for op in circuit.ops]
    return reduce(lambda acc, m: m @ acc, mats, np.eye(1 << n, dtype=complex))


def kron_state(circuit: Circuit, params=None) -> np.ndarray:
    return kron_unitary(circuit, params)[:, 0]


@pytest.fixture
def make_circuit():
    return random_circuit
