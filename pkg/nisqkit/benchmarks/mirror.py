"""Mirror circuits built around a Clifford base circuit."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import CLIFFORD, Gate, GateKind, cx, h, pauli_gate, s, x
from nisqkit.circuits.pauli import PAULI_LETTERS, conjugate_through, conjugation_table
from nisqkit.core.config import settings
from nisqkit.core.errors import NonCliffordError
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import MirrorResult
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.readout import measured_distribution
from nisqkit.simulators.statevector import bits_to_index

logger = get_logger(__name__)

# Words preparing the six single-qubit Pauli eigenstates from |0>.
PREP_WORDS = ((), (x,), (h,), (x, h), (h, s), (x, h, s))


def check_clifford(circuit: Circuit) -> None:
    """Raise NonCliffordError unless every gate is a bound Clifford."""
    for op in circuit.ops:
        if op.kind is GateKind.RAW:
            conjugation_table(op)
        elif op.kind not in CLIFFORD:
            raise NonCliffordError(f"Mirror circuits need a Clifford base; found {op.kind.value}")


def mirror_circuit(base: Circuit, rng: np.random.Generator) -> tuple[Circuit, str]:
    """
    Build L, C, Q, C^-1, L^-1 and the bitstring it ideally outputs.

    L prepares a random Pauli eigenstate on each qubit and Q is a random Pauli
    layer. The output is L^dag C^dag Q C L |0>, a Pauli applied to |0>, so the
    ideal outcome has a 1 wherever that Pauli has an X or Y.

    Raises:
        NonCliffordError: The base circuit has a non-Clifford gate.
    """
    check_clifford(base)
    n = base.n_qubits
    prep: list[Gate] = []
    for q in range(n):
        prep.extend(make(q) for make in PREP_WORDS[int(rng.integers(len(PREP_WORDS)))])
    letters = "".join(PAULI_LETTERS[int(rng.integers(4))] for _ in range(n))
    layer = [pauli_gate(c, q) for q, c in enumerate(letters) if c != "I"]
    prep_circuit = Circuit(n, tuple(prep))
    ops = prep + list(base.ops) + layer + list(base.inverse().ops) + list(prep_circuit.inverse().ops)
    tracked = conjugate_through(letters, list(base.inverse().ops) + list(prep_circuit.inverse().ops))
    expected = "".join("1" if c in "XY" else "0" for c in tracked.letters)
    return Circuit(n, tuple(ops)), expected


def polarization(survival: float, width: int) -> float:
    """(S - 1/2^w) / (1 - 1/2^w)."""
    floor = 1.0 / (1 << width)
    return (survival - floor) / (1.0 - floor)


def mirror_run(
    base: Circuit,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    repetitions: int = 10,
    *,
    shots: int = 0,
    threads: int | None = None,
) -> MirrorResult:
    """
    Mean polarization over `repetitions` randomized mirror circuits of `base`.

    Args:
        base: Bound Clifford circuit C.
        noise: Noise model; noiseless when omitted.
        rng: Master generator.
        repetitions: Number of (L, Q) randomizations.
        shots: Shots per circuit; 0 reads the exact success probability.
        threads: Worker count.
    """
    check_clifford(base)
    noise = noise or NoiseModel()
    rng = rng or np.random.default_rng(settings.SEED)

    def run(child: np.random.Generator) -> float:
        circuit, expected = mirror_circuit(base, child)
        probs = measured_distribution(circuit, noise)
        success = float(probs[bits_to_index(expected, base.n_qubits)])
        if shots > 0:
            success = child.binomial(shots, min(max(success, 0.0), 1.0)) / shots
        return success

    children = rng.spawn(repetitions)
    workers = max(1, threads or settings.THREADS)
    if workers == 1:
        survivals = [run(c) for c in children]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            survivals = list(pool.map(run, children))
    values = [polarization(v, base.n_qubits) for v in survivals]
    mean = float(np.mean(values))
    logger.info(f"Mirror circuits on {base.n_qubits} qubits: polarization {mean:.4f}")
    return MirrorResult(polarizations=values, polarization=mean, survivals=survivals)


def random_clifford_circuit(n_qubits: int, depth: int, rng: np.random.Generator) -> Circuit:
    """`depth` layers of random H/S/identity on each qubit followed by CX on a random pair."""
    ops: list[Gate] = []
    for _ in range(depth):
        for q in range(n_qubits):
            choice = int(rng.integers(3))
            if choice == 1:
                ops.append(h(q))
            elif choice == 2:
                ops.append(s(q))
        if n_qubits > 1:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            ops.append(cx(int(a), int(b)))
    return Circuit(n_qubits, tuple(ops))
