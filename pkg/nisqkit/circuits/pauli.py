"""Pauli strings, observables and Clifford conjugation.

Letter j of a Pauli word acts on qubit j; qubit 0 is the most significant bit
of a basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from nisqkit.circuits.gates import CLIFFORD, Gate, GateKind, gate_matrix
from nisqkit.core.errors import InputError, NonCliffordError, WidthMismatchError

PAULI_LETTERS = "IXYZ"
CONJUGATION_CACHE_SIZE = 4096
PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-letter products: (a, b) -> (phase, a*b)
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def _check_letters(letters: str) -> None:
    if not letters or any(c not in PAULI_LETTERS for c in letters):
        raise InputError(f"Invalid Pauli word '{letters}'")


def pauli_word_matrix(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli word."""
    out = np.ones((1, 1), dtype=complex)
    for c in letters:
        out = np.kron(out, PAULI_MATRICES[c])
    return out


def words_commute(a: str, b: str) -> bool:
    """Two Pauli words commute iff they anticommute on an even number of sites."""
    clashes = sum(1 for p, q in zip(a, b) if p != "I" and q != "I" and p != q)
    return clashes % 2 == 0


def all_pauli_words(n: int) -> list[str]:
    return ["".join(w) for w in product(PAULI_LETTERS, repeat=n)]


@dataclass(frozen=True)
class PauliString:
    """Real-weighted Pauli word."""

    letters: str
    coefficient: float = 1.0

    def __post_init__(self):
        _check_letters(self.letters)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, c in enumerate(self.letters) if c != "I")

    def masks(self) -> tuple[int, int, int]:
        """
        Bit masks describing the action on basis states.

        Returns:
            tuple: (flip_mask, sign_mask, y_count) such that
                P|j> = i^y_count (-1)^popcount(j & sign_mask) |j ^ flip_mask>.
        """
        n = self.n_qubits
        flip = sign = 0
        y_count = 0
        for q, c in enumerate(self.letters):
            bit = 1 << (n - 1 - q)
            if c in "XY":
                flip |= bit
            if c in "YZ":
                sign |= bit
            if c == "Y":
                y_count += 1
        return flip, sign, y_count

    def commutes_with(self, other: "PauliString | str") -> bool:
        letters = other.letters if isinstance(other, PauliString) else other
        return words_commute(self.letters, letters)

    def to_matrix(self) -> np.ndarray:
        return self.coefficient * pauli_word_matrix(self.letters)

    def __str__(self) -> str:
        return f"{self.coefficient!r} {self.letters}"


@dataclass(frozen=True)
class PhasedPauli:
    """Pauli word with a phase in {+1, -1, +i, -i}, as produced by Clifford conjugation."""

    letters: str
    phase: complex = 1

    def __post_init__(self):
        _check_letters(self.letters)
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def sign(self) -> int:
        """Real sign of the phase; raises when the phase is imaginary."""
        if abs(self.phase.imag) > 1e-12:
            raise InputError("Phase is imaginary")
        return 1 if self.phase.real > 0 else -1

    def __mul__(self, other: "PhasedPauli") -> "PhasedPauli":
        if len(self.letters) != len(other.letters):
            raise WidthMismatchError("Pauli widths differ")
        phase = self.phase * other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            p, c = _PRODUCT[(a, b)]
            phase *= p
            out.append(c)
        return PhasedPauli("".join(out), phase)

    def to_matrix(self) -> np.ndarray:
        return self.phase * pauli_word_matrix(self.letters)


@lru_cache(maxsize=CONJUGATION_CACHE_SIZE)
def _conjugation_table(kind: GateKind, matrix_key: bytes | None = None) -> dict[str, tuple[complex, str]]:
    """Map local Pauli words w to (phase, w') with U w U^dag = phase * w'."""
    if matrix_key is None:
        u = gate_matrix(Gate(kind, tuple(range(2 if kind in (GateKind.CX, GateKind.CZ, GateKind.SWAP) else 1))))
    else:
        dim = int(round(np.sqrt(len(matrix_key) // 16)))
        u = np.frombuffer(matrix_key, dtype=complex).reshape(dim, dim)
    k = int(np.log2(u.shape[0]))
    words = all_pauli_words(k)
    basis = {w: pauli_word_matrix(w) for w in words}
    table = {}
    for w in words:
        image = u @ basis[w] @ u.conj().T
        for cand in words:
            overlap = np.trace(basis[cand] @ image) / (1 << k)
            if abs(abs(overlap) - 1) < 1e-9:
                phase = complex(np.round(overlap.real), np.round(overlap.imag))
                table[w] = (phase, cand)
                break
        else:
            raise NonCliffordError("Gate does not map Paulis to Paulis")
    return table


def conjugation_table(gate: Gate) -> dict[str, tuple[complex, str]]:
    if gate.kind is GateKind.RAW:
        return _conjugation_table(GateKind.RAW, np.ascontiguousarray(gate.matrix).tobytes())
    if gate.kind not in CLIFFORD:
        raise NonCliffordError(f"{gate.kind.value} is not a Clifford gate")
    return _conjugation_table(gate.kind)


def pauli_apply_conjugation(p: PauliString | PhasedPauli | str, clifford: Gate) -> PhasedPauli:
    """
    Conjugate a Pauli word by a Clifford gate.

    Args:
        p: Pauli word (coefficients of PauliString inputs are ignored).
        clifford: Clifford gate, or a raw Clifford matrix.

    Returns:
        PhasedPauli: C P C^dag with its phase.
    """
    if isinstance(p, str):
        p = PhasedPauli(p)
    elif isinstance(p, PauliString):
        p = PhasedPauli(p.letters)
    if max(clifford.targets) >= len(p.letters):
        raise WidthMismatchError("Gate acts outside the Pauli word")
    table = conjugation_table(clifford)
    local = "".join(p.letters[q] for q in clifford.targets)
    phase, image = table[local]
    letters = list(p.letters)
    for q, c in zip(clifford.targets, image):
        letters[q] = c
    return PhasedPauli("".join(letters), p.phase * phase)


def conjugate_through(p: PhasedPauli | str, gates: Iterable[Gate]) -> PhasedPauli:
    """Conjugate by a gate sequence applied in order: returns U P U^dag for U = g_k...g_1."""
    out = PhasedPauli(p) if isinstance(p, str) else p
    for g in gates:
        out = pauli_apply_conjugation(out, g)
    return out


@dataclass(frozen=True)
class Observable:
    """Hermitian operator as a real-weighted sum of Pauli strings."""

    terms: tuple[PauliString, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InputError("Observable needs at least one term")
        widths = {t.n_qubits for t in terms}
        if len(widths) != 1:
            raise WidthMismatchError(f"Observable terms have different widths {sorted(widths)}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, terms: Sequence[tuple[float, str]]) -> "Observable":
        return cls(tuple(PauliString(w, c) for c, w in terms))

    @classmethod
    def single(cls, letters: str, coefficient: float = 1.0) -> "Observable":
        return cls((PauliString(letters, coefficient),))

    @property
    def n_qubits(self) -> int:
        return self.terms[0].n_qubits

    def to_matrix(self) -> np.ndarray:
        return sum(t.to_matrix() for t in self.terms)

    def check_width(self, n: int) -> None:
        if self.n_qubits != n:
            raise WidthMismatchError(f"Observable acts on {self.n_qubits} qubits, state has {n}")


def parse_observable(text: str) -> Observable:
    """
    Parse lines of `coeff PAULIWORD`.

    Args:
        text: Observable source, `//` comments allowed.

    Returns:
        Observable: Parsed observable.
    """
    terms = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("//", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"Expected 'coeff WORD' on line {lineno}: {raw_line!r}")
        try:
            coeff = float(parts[0])
        except ValueError as e:
            raise InputError(f"Bad coefficient on line {lineno}: {parts[0]!r}") from e
        terms.append(PauliString(parts[1].upper(), coeff))
    return Observable(tuple(terms))


def render_observable(obs: Observable) -> str:
    return "\n".join(str(t) for t in obs.terms) + "\n"
