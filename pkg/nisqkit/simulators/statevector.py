"""Dense state-vector (Schrodinger) simulator.

Gates are applied in place, block by block: for a k-qubit gate the basis
indices are split into 2^(n-k) groups of 2^k amplitudes that differ only on
the target bits, and each block of groups is gathered, multiplied by the gate
matrix and scattered back. Scratch memory is O(2^k * block size).
"""

from __future__ import annotations

import threading
import weakref
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, GateKind, gate_matrix
from nisqkit.circuits.pauli import Observable, PauliString
from nisqkit.core.config import settings
from nisqkit.core.errors import InputError, MemoryBudgetError, NumericalError, QubitIndexError, WidthMismatchError
from nisqkit.core.logging import get_logger

logger = get_logger(__name__)

# Below this many groups a gate is applied on the calling thread.
PARALLEL_MIN_GROUPS = 1 << 16
MEASURE_TOL = 1e-12


class BufferMonitor:
    """Counts live full-size state buffers; used to check memory contracts."""

    def __init__(self):
        self._lock = threading.Lock()
        self.live = 0
        self.peak = 0

    def acquire(self, owner) -> None:
        with self._lock:
            self.live += 1
            self.peak = max(self.peak, self.live)
        weakref.finalize(owner, self._release)

    def _release(self) -> None:
        with self._lock:
            self.live -= 1

    def reset_peak(self) -> None:
        with self._lock:
            self.peak = self.live


monitor = BufferMonitor()


def required_bytes(n_qubits: int, dtype=None) -> int:
    return (1 << n_qubits) * np.dtype(dtype or settings.complex_dtype).itemsize


def check_memory(n_qubits: int, dtype=None, memory_budget: int | None = None) -> None:
    budget = settings.MEMORY_BUDGET_BYTES if memory_budget is None else memory_budget
    need = required_bytes(n_qubits, dtype)
    if need > budget:
        raise MemoryBudgetError(need, budget)


def bits_to_index(bits: str, n_qubits: int) -> int:
    """Basis index of a bitstring; the first character is qubit 0, the most significant bit."""
    if len(bits) != n_qubits:
        raise WidthMismatchError(f"Bitstring '{bits}' has length {len(bits)}, state has {n_qubits} qubits")
    if any(c not in "01" for c in bits):
        raise InputError(f"Invalid bitstring '{bits}'")
    return int(bits, 2)


def index_to_bits(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def parity(values: np.ndarray) -> np.ndarray:
    """Popcount parity of non-negative int64 values."""
    x = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> shift
    return x & 1


def _deposit_zeros(r: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Insert zero bits at the given ascending bit positions."""
    idx = r
    for p in positions:
        low = idx & ((1 << p) - 1)
        idx = ((idx >> p) << (p + 1)) | low
    return idx


def _local_offsets(n_qubits: int, targets: Sequence[int]) -> np.ndarray:
    """Offset of each local basis state; target i is bit k-1-i of the local index."""
    k = len(targets)
    offsets = np.zeros(1 << k, dtype=np.int64)
    for m in range(1 << k):
        for i, t in enumerate(targets):
            if (m >> (k - 1 - i)) & 1:
                offsets[m] |= 1 << (n_qubits - 1 - t)
    return offsets


class StateVector:
    """Pure state of n qubits as 2^n complex amplitudes, qubit 0 most significant."""

    def __init__(
        self,
        n_qubits: int,
        amplitudes: np.ndarray | None = None,
        *,
        dtype=None,
        memory_budget: int | None = None,
        block_size: int | None = None,
        threads: int | None = None,
    ):
        if n_qubits < 1:
            raise QubitIndexError("State needs at least one qubit")
        dtype = np.dtype(dtype or settings.complex_dtype)
        check_memory(n_qubits, dtype, memory_budget)
        self.n_qubits = n_qubits
        self.block_size = block_size or settings.SV_BLOCK_SIZE
        self.threads = threads or settings.THREADS
        if amplitudes is None:
            self.amplitudes = np.zeros(1 << n_qubits, dtype=dtype)
            self.amplitudes[0] = 1
        else:
            amplitudes = np.asarray(amplitudes).reshape(-1)
            if amplitudes.shape[0] != 1 << n_qubits:
                raise WidthMismatchError(f"Expected {1 << n_qubits} amplitudes, got {amplitudes.shape[0]}")
            self.amplitudes = amplitudes.astype(dtype, copy=True)
        monitor.acquire(self)

    @property
    def dtype(self):
        return self.amplitudes.dtype

    def copy(self) -> "StateVector":
        return StateVector(
            self.n_qubits, self.amplitudes, dtype=self.dtype, block_size=self.block_size, threads=self.threads
        )

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        return p / p.sum()

    def _check_targets(self, targets: Sequence[int]) -> None:
        for t in targets:
            if not 0 <= t < self.n_qubits:
                raise QubitIndexError(f"Target {t} outside a {self.n_qubits}-qubit state")

    def _run_blocks(self, kernel, n_groups: int) -> None:
        starts = range(0, n_groups, self.block_size)
        if self.threads <= 1 or n_groups < PARALLEL_MIN_GROUPS:
            for start in starts:
                kernel(start, min(start + self.block_size, n_groups))
            return
        # Outer loop split into contiguous chunks of blocks; blocks touch disjoint amplitudes.
        chunk = -(-n_groups // self.threads)

        def run(lo: int) -> None:
            hi = min(lo + chunk, n_groups)
            for start in range(lo, hi, self.block_size):
                kernel(start, min(start + self.block_size, hi))

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            list(pool.map(run, range(0, n_groups, chunk)))

    def apply_matrix(self, matrix: np.ndarray, targets: Sequence[int]) -> None:
        """
        Apply a dense 2^k x 2^k operator to the given targets in place.

        Args:
            matrix: Operator with the first target as the most significant local bit.
                It need not be unitary.
            targets: Distinct qubit indices.
        """
        targets = tuple(int(t) for t in targets)
        self._check_targets(targets)
        k = len(targets)
        if len(set(targets)) != k:
            raise InputError(f"Repeated target in {targets}")
        matrix = np.asarray(matrix, dtype=self.dtype)
        if matrix.shape != (1 << k, 1 << k):
            raise InputError(f"Matrix shape {matrix.shape} does not match {k} targets")
        n = self.n_qubits
        positions = sorted(n - 1 - t for t in targets)
        offsets = _local_offsets(n, targets)
        psi = self.amplitudes
        mt = np.ascontiguousarray(matrix.T)

        def kernel(start: int, stop: int) -> None:
            base = _deposit_zeros(np.arange(start, stop, dtype=np.int64), positions)
            idx = base[:, None] + offsets[None, :]
            psi[idx] = psi[idx] @ mt

        self._run_blocks(kernel, 1 << (n - k))

    def _apply_ccz(self, targets: Sequence[int]) -> None:
        n = self.n_qubits
        positions = sorted(n - 1 - t for t in targets)
        ones = sum(1 << p for p in positions)
        psi = self.amplitudes

        def kernel(start: int, stop: int) -> None:
            idx = _deposit_zeros(np.arange(start, stop, dtype=np.int64), positions) + ones
            psi[idx] = -psi[idx]

        self._run_blocks(kernel, 1 << (n - 3))

    def apply_gate(self, gate: Gate, params: Sequence[float] | None = None) -> None:
        """Apply one gate in place; symbolic angles are resolved from params."""
        self._check_targets(gate.targets)
        if gate.kind is GateKind.CCZ:
            self._apply_ccz(gate.targets)
            return
        self.apply_matrix(gate_matrix(gate, params), gate.targets)

    def apply_circuit(self, circuit: Circuit, params: Sequence[float] | None = None) -> "StateVector":
        if circuit.n_qubits != self.n_qubits:
            raise WidthMismatchError(f"Circuit has {circuit.n_qubits} qubits, state has {self.n_qubits}")
        if not circuit.is_bound:
            circuit.check_params(params)
        for op in circuit.ops:
            self.apply_gate(op, params)
        return self

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[bits_to_index(bits, self.n_qubits)])

    def expectation_pauli(self, pauli: PauliString) -> float:
        """<psi|P|psi> for one Pauli word, without its coefficient."""
        return bilinear_pauli(self, self, pauli).real

    def expectation(self, obs: Observable) -> float:
        """Sum over terms of coefficient * <psi|P|psi>."""
        obs.check_width(self.n_qubits)
        return float(sum(term.coefficient * self.expectation_pauli(term) for term in obs.terms))

    def sample(self, shots: int, rng: np.random.Generator) -> list[str]:
        if shots < 1:
            raise InputError("shots must be at least 1")
        draws = rng.choice(1 << self.n_qubits, size=shots, p=self.probabilities())
        return [index_to_bits(int(d), self.n_qubits) for d in draws]

    def measure_qubit(self, q: int, rng: np.random.Generator) -> int:
        """
        Projective Z measurement of one qubit with collapse.

        Args:
            q: Qubit to measure.
            rng: Source of the uniform draw.

        Returns:
            int: Outcome bit; the state is projected and renormalized.
        """
        self._check_targets((q,))
        view = self.amplitudes.reshape(1 << q, 2, 1 << (self.n_qubits - 1 - q))
        p1 = float(np.vdot(view[:, 1, :], view[:, 1, :]).real)
        outcome = 1 if rng.random() < p1 else 0
        p = p1 if outcome else 1.0 - p1
        if p < MEASURE_TOL:
            raise NumericalError(f"Selected outcome {outcome} on qubit {q} has probability {p:.3e}")
        view[:, 1 - outcome, :] = 0
        view[:, outcome, :] /= np.sqrt(p)
        return outcome

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits}, dtype={self.dtype})"


def _pauli_terms(n: int, start: int, stop: int, pauli: PauliString):
    flip, sign, y_count = pauli.masks()
    j = np.arange(start, stop, dtype=np.int64)
    signs = 1 - 2 * parity(j & sign)
    return j, j ^ flip, signs * (1j ** y_count)


def bilinear_pauli(bra: StateVector, ket: StateVector, pauli: PauliString, chunk: int | None = None) -> complex:
    """
    <bra|P|ket> for a Pauli word, streamed over index chunks.

    Args:
        bra: Left state.
        ket: Right state.
        pauli: Pauli word; its coefficient is ignored.
        chunk: Indices per chunk; defaults to settings.EXPECTATION_CHUNK.

    Returns:
        complex: The matrix element.
    """
    n = ket.n_qubits
    if bra.n_qubits != n or pauli.n_qubits != n:
        raise WidthMismatchError(f"Pauli word on {pauli.n_qubits} qubits, states on {bra.n_qubits}/{n}")
    chunk = chunk or settings.EXPECTATION_CHUNK
    total = 0j
    for start in range(0, 1 << n, chunk):
        j, flipped, phase = _pauli_terms(n, start, min(start + chunk, 1 << n), pauli)
        total += complex(np.sum(np.conj(bra.amplitudes[flipped]) * phase * ket.amplitudes[j]))
    return total


def init_zero(n_qubits: int, *, memory_budget: int | None = None, dtype=None) -> StateVector:
    """|0...0> on n qubits; raises MemoryBudgetError when 2^n amplitudes exceed the budget."""
    return StateVector(n_qubits, dtype=dtype, memory_budget=memory_budget)


def apply_gate(state: StateVector, gate: Gate, params: Sequence[float] | None = None) -> None:
    state.apply_gate(gate, params)


def amplitude(state: StateVector, bits: str) -> complex:
    return state.amplitude(bits)


def expectation(state: StateVector, obs: Observable) -> float:
    return state.expectation(obs)


def sample(state: StateVector, shots: int, rng: np.random.Generator) -> list[str]:
    return state.sample(shots, rng)


def measure_qubit(state: StateVector, q: int, rng: np.random.Generator) -> int:
    return state.measure_qubit(q, rng)


def simulate(circuit: Circuit, params: Sequence[float] | None = None, **kwargs) -> StateVector:
    """Run a circuit from |0...0> and return the final state."""
    state = StateVector(circuit.n_qubits, **kwargs)
    logger.debug(f"Simulating {len(circuit)} gates on {circuit.n_qubits} qubits")
    return state.apply_circuit(circuit, params)


def output_distribution(circuit: Circuit, params: Sequence[float] | None = None) -> np.ndarray:
    return simulate(circuit, params).probabilities()


def circuit_unitary(circuit: Circuit, params: Sequence[float] | None = None) -> np.ndarray:
    """Dense 2^n x 2^n unitary of a circuit, built by tensor contraction on the operator."""
    n = circuit.n_qubits
    dim = 1 << n
    u = np.eye(dim, dtype=complex).reshape([2] * n + [dim])
    for op in circuit.ops:
        k = op.arity
        g = gate_matrix(op, params).reshape([2] * (2 * k))
        u = np.tensordot(g, u, axes=(list(range(k, 2 * k)), list(op.targets)))
        u = np.moveaxis(u, list(range(k)), list(op.targets))
    return u.reshape(dim, dim)


def accumulate_pauli(dst: StateVector, src: StateVector, pauli: PauliString, chunk: int | None = None) -> None:
    """dst += coefficient * P|src>, streamed over index chunks without a temporary state."""
    n = src.n_qubits
    if dst.n_qubits != n or pauli.n_qubits != n:
        raise WidthMismatchError(f"Pauli word on {pauli.n_qubits} qubits, states on {dst.n_qubits}/{n}")
    chunk = chunk or settings.EXPECTATION_CHUNK
    for start in range(0, 1 << n, chunk):
        j, flipped, phase = _pauli_terms(n, start, min(start + chunk, 1 << n), pauli)
        dst.amplitudes[flipped] += pauli.coefficient * phase * src.amplitudes[j]
