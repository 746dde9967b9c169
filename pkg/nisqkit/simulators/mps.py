"""Matrix-product-state simulator in right-canonical form.

Site tensors B[j] have shape (D_left, 2, D_right) and satisfy
sum_s B^s B^s^dag = I. Bond vector lambdas[j] holds the Schmidt values of the
cut between sites j and j+1.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import FIXED_MATRICES, Gate, GateKind, gate_matrix, permute_matrix
from nisqkit.circuits.pauli import PAULI_MATRICES, Observable, PauliString
from nisqkit.core.config import settings
from nisqkit.core.errors import InputError, NumericalError, QubitIndexError, WidthMismatchError
from nisqkit.core.logging import get_logger
from nisqkit.simulators.statevector import bits_to_index, index_to_bits

logger = get_logger(__name__)

# Singular values at or below this are treated as zero even when eps = 0.
ZERO_FLOOR = 1e-14
UNDERFLOW = 1e-14
MAX_RESAMPLE = 100


class MPSState:
    """Right-canonical MPS with truncation controls."""

    def __init__(self, n_qubits: int, max_bond: int | None = None, truncation: float | None = None):
        if n_qubits < 2:
            raise InputError("MPS needs at least two sites; use the state-vector simulator for one qubit")
        self.n_qubits = n_qubits
        self.max_bond = max_bond or settings.MPS_MAX_BOND
        self.truncation = settings.MPS_TRUNCATION if truncation is None else truncation
        zero = np.zeros((1, 2, 1), dtype=complex)
        zero[0, 0, 0] = 1
        self.tensors: list[np.ndarray] = [zero.copy() for _ in range(n_qubits)]
        self.lambdas: list[np.ndarray] = [np.ones(1) for _ in range(n_qubits - 1)]
        self.discarded_weight = 0.0

    @property
    def bond_dims(self) -> list[int]:
        return [len(lam) for lam in self.lambdas]

    def _check_site(self, j: int) -> None:
        if not 0 <= j < self.n_qubits:
            raise QubitIndexError(f"Site {j} outside a {self.n_qubits}-site MPS")

    def _left_weight(self, j: int) -> np.ndarray:
        return self.lambdas[j - 1] if j > 0 else np.ones(1)

    def apply_1q(self, matrix: np.ndarray, j: int) -> None:
        self._check_site(j)
        self.tensors[j] = np.einsum("ts,lsr->ltr", matrix, self.tensors[j])

    def apply_2q(self, matrix: np.ndarray, j: int) -> float:
        """
        Two-site update on sites (j, j+1).

        Args:
            matrix: 4x4 gate with site j as the most significant bit.
            j: Left site.

        Returns:
            float: Discarded weight (sum of dropped squared singular values).
        """
        self._check_site(j)
        self._check_site(j + 1)
        b1, b2 = self.tensors[j], self.tensors[j + 1]
        dl, dr = b1.shape[0], b2.shape[2]
        theta = np.einsum("lar,rbs->labs", b1, b2)
        theta = np.einsum("abcd,lcds->labs", matrix.reshape(2, 2, 2, 2), theta)
        c = self._left_weight(j)[:, None, None, None] * theta
        _, s, y = np.linalg.svd(c.reshape(dl * 2, 2 * dr), full_matrices=False)

        keep = s > max(self.truncation, ZERO_FLOOR)
        keep[min(self.max_bond, len(s)):] = False
        if not keep.any():
            raise NumericalError("Two-site update left no singular values above the truncation threshold")
        total = float(np.sum(s**2))
        kept = s[keep]
        discarded = float(total - np.sum(kept**2)) / total if total > 0 else 0.0
        norm = np.linalg.norm(kept)

        y = y[keep].reshape(len(kept), 2, dr)
        self.tensors[j + 1] = y
        self.tensors[j] = np.einsum("labs,dbs->lad", theta, y.conj()) / norm
        self.lambdas[j] = kept / norm
        self.discarded_weight += max(discarded, 0.0)
        if discarded > 0:
            logger.debug(f"Bond {j}: kept {len(kept)} of {len(s)} values, discarded weight {discarded:.3e}")
        return max(discarded, 0.0)

    def apply_2q_nonadjacent(self, matrix: np.ndarray, i: int, j: int) -> float:
        """
        Two-qubit gate between any sites via a SWAP chain.

        Args:
            matrix: 4x4 gate with site i as the most significant bit.
            i: First target.
            j: Second target.

        Returns:
            float: Total discarded weight of the chain.
        """
        if i == j:
            raise InputError("Two-qubit gate needs distinct sites")
        if i > j:
            return self.apply_2q_nonadjacent(permute_matrix(matrix, [1, 0]), j, i)
        if j == i + 1:
            return self.apply_2q(matrix, i)
        swap = FIXED_MATRICES[GateKind.SWAP]
        weight = 0.0
        for k in range(i, j - 1):
            weight += self.apply_2q(swap, k)
        weight += self.apply_2q(matrix, j - 1)
        for k in range(j - 2, i - 1, -1):
            weight += self.apply_2q(swap, k)
        return weight

    def apply_gate(self, gate: Gate, params: Sequence[float] | None = None) -> float:
        matrix = gate_matrix(gate, params)
        if gate.arity == 1:
            self.apply_1q(matrix, gate.targets[0])
            return 0.0
        if gate.arity == 2:
            return self.apply_2q_nonadjacent(matrix, *gate.targets)
        raise InputError(f"MPS simulator supports one- and two-qubit gates, got {gate!r}")

    def apply_circuit(self, circuit: Circuit, params: Sequence[float] | None = None) -> "MPSState":
        if circuit.n_qubits != self.n_qubits:
            raise WidthMismatchError(f"Circuit has {circuit.n_qubits} qubits, MPS has {self.n_qubits}")
        for op in circuit.ops:
            self.apply_gate(op, params)
        return self

    def amplitude(self, bits: str) -> complex:
        bits_to_index(bits, self.n_qubits)
        v = np.ones(1, dtype=complex)
        for j, c in enumerate(bits):
            v = v @ self.tensors[j][:, int(c), :]
        return complex(v[0])

    def _transfer(self, env: np.ndarray, j: int, op: np.ndarray) -> np.ndarray:
        b = self.tensors[j]
        return np.einsum("lm,lsr,ts,mtq->rq", env, b, op, b.conj())

    def expectation_pauli(self, pauli: PauliString) -> float:
        """<P> for one Pauli word, coefficient ignored."""
        if pauli.n_qubits != self.n_qubits:
            raise WidthMismatchError(f"Pauli word on {pauli.n_qubits} qubits, MPS has {self.n_qubits}")
        support = pauli.support
        if not support:
            return 1.0
        first, last = support[0], support[-1]
        weight = self._left_weight(first)
        env = np.diag(weight**2).astype(complex)
        for j in range(first, last + 1):
            env = self._transfer(env, j, PAULI_MATRICES[pauli.letters[j]])
        return float(np.trace(env).real)

    def expectation(self, obs: Observable) -> float:
        obs.check_width(self.n_qubits)
        return float(sum(t.coefficient * self.expectation_pauli(t) for t in obs.terms))

    def _sample_batch(self, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        outcomes = np.zeros((count, self.n_qubits), dtype=np.int8)
        underflow = np.zeros(count, dtype=bool)
        v = np.ones((count, 1), dtype=complex)
        for j in range(self.n_qubits):
            w = np.einsum("kl,lsr->ksr", v, self.tensors[j])
            p = np.sum(np.abs(w) ** 2, axis=2)
            p1 = p[:, 1] / p.sum(axis=1)
            bit = (rng.random(count) < p1).astype(np.int8)
            chosen = np.where(bit == 1, p[:, 1], p[:, 0])
            underflow |= chosen < UNDERFLOW
            outcomes[:, j] = bit
            v = w[np.arange(count), bit, :] / np.sqrt(np.maximum(chosen, UNDERFLOW))[:, None]
        return outcomes, underflow

    def sample(self, shots: int, rng: np.random.Generator) -> list[str]:
        """
        Exact ancestral sampling from left to right.

        Each site draws from its conditional marginal given the outcomes to its
        left; right-canonical form makes the right environment the identity.
        Shots whose chosen branch underflows are redrawn.
        """
        if shots < 1:
            raise InputError("shots must be at least 1")
        outcomes, bad = self._sample_batch(shots, rng)
        for _ in range(MAX_RESAMPLE):
            if not bad.any():
                break
            redo = np.flatnonzero(bad)
            outcomes[redo], bad_redo = self._sample_batch(len(redo), rng)
            bad = np.zeros(shots, dtype=bool)
            bad[redo] = bad_redo
        else:
            raise NumericalError("Sampling kept hitting vanishing conditional probabilities")
        return ["".join("1" if b else "0" for b in row) for row in outcomes]

    def schmidt_values(self, cut: int) -> np.ndarray:
        """Schmidt values of the cut between sites cut and cut+1."""
        if not 0 <= cut < self.n_qubits - 1:
            raise QubitIndexError(f"Cut {cut} outside 0..{self.n_qubits - 2}")
        return self.lambdas[cut].copy()

    def right_canonical_error(self) -> float:
        """Largest deviation of sum_s B^s B^s^dag from the identity over all sites."""
        worst = 0.0
        for b in self.tensors:
            gram = np.einsum("lsr,msr->lm", b, b.conj())
            worst = max(worst, float(np.max(np.abs(gram - np.eye(b.shape[0])))))
        return worst

    def to_statevector(self) -> np.ndarray:
        psi = self.tensors[0].reshape(2, -1)
        for b in self.tensors[1:]:
            psi = np.einsum("xl,lsr->xsr", psi, b).reshape(-1, b.shape[2])
        return psi.reshape(-1)

    def amplitudes(self) -> dict[str, complex]:
        vec = self.to_statevector()
        return {index_to_bits(k, self.n_qubits): complex(vec[k]) for k in range(len(vec))}

    def __repr__(self) -> str:
        return f"MPSState(n_qubits={self.n_qubits}, bond_dims={self.bond_dims})"


def init_product(n_qubits: int, max_bond: int | None = None, truncation: float | None = None) -> MPSState:
    return MPSState(n_qubits, max_bond, truncation)


def simulate_mps(
    circuit: Circuit,
    params: Sequence[float] | None = None,
    *,
    max_bond: int | None = None,
    truncation: float | None = None,
) -> MPSState:
    state = MPSState(circuit.n_qubits, max_bond, truncation)
    state.apply_circuit(circuit, params)
    logger.debug(f"MPS run finished: bonds {state.bond_dims}, discarded {state.discarded_weight:.3e}")
    return state
