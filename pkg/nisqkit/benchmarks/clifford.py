"""One- and two-qubit Clifford groups enumerated by their Pauli tableaux."""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import Gate, cx, h, raw, s
from nisqkit.circuits.pauli import PhasedPauli, pauli_apply_conjugation
from nisqkit.core.errors import InputError, NumericalError
from nisqkit.core.logging import get_logger

logger = get_logger(__name__)

GROUP_SIZES = {1: 24, 2: 11520}
Tableau = tuple[tuple[str, int], ...]


def _generators(n: int) -> list[Gate]:
    if n == 1:
        return [h(0), s(0)]
    return [h(0), s(0), h(1), s(1), cx(0, 1), cx(1, 0)]


def _identity_images(n: int) -> list[PhasedPauli]:
    out = []
    for q in range(n):
        for letter in "XZ":
            word = ["I"] * n
            word[q] = letter
            out.append(PhasedPauli("".join(word)))
    return out


def _key(images: Sequence[PhasedPauli]) -> Tableau:
    return tuple((p.letters, p.sign) for p in images)


def tableau(word: Sequence[Gate], n: int) -> Tableau:
    """Images U X_q U^dag and U Z_q U^dag with signs; fixes U up to global phase."""
    images = _identity_images(n)
    for g in word:
        images = [pauli_apply_conjugation(p, g) for p in images]
    return _key(images)


class CliffordGroup:
    """All n-qubit Cliffords as shortest words over {H, S, CX}, found by breadth-first search."""

    def __init__(self, n: int):
        if n not in GROUP_SIZES:
            raise InputError(f"Clifford groups are available for 1 or 2 qubits, got {n}")
        self.n = n
        self.words: list[tuple[Gate, ...]] = []
        self.index: dict[Tableau, int] = {}
        start = _identity_images(n)
        queue = deque([(start, ())])
        self.index[_key(start)] = 0
        self.words.append(())
        generators = _generators(n)
        while queue:
            images, word = queue.popleft()
            for g in generators:
                nxt = [pauli_apply_conjugation(p, g) for p in images]
                key = _key(nxt)
                if key in self.index:
                    continue
                self.index[key] = len(self.words)
                self.words.append(word + (g,))
                queue.append((nxt, word + (g,)))
        if len(self.words) != GROUP_SIZES[n]:
            raise NumericalError(f"Enumerated {len(self.words)} Cliffords, expected {GROUP_SIZES[n]}")
        self._unitaries: dict[int, np.ndarray] = {}
        logger.debug(f"Enumerated {len(self.words)} {n}-qubit Cliffords")

    def __len__(self) -> int:
        return len(self.words)

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(len(self.words)))

    def lookup(self, word: Sequence[Gate]) -> int:
        return self.index[tableau(word, self.n)]

    def inverse(self, word: Sequence[Gate]) -> int:
        """Element whose tableau is that of the reversed adjoint word."""
        return self.lookup([g.adjoint() for g in reversed(word)])

    def unitary(self, element: int) -> np.ndarray:
        if element not in self._unitaries:
            self._unitaries[element] = Circuit(self.n, self.words[element]).unitary()
        return self._unitaries[element]

    def as_gate(self, element: int, targets: Sequence[int] | None = None) -> Gate:
        """The element as a single raw gate."""
        return raw(self.unitary(element), *(targets or range(self.n)))


@lru_cache(maxsize=None)
def clifford_group(n: int) -> CliffordGroup:
    return CliffordGroup(n)


def clifford_sample(n: int, rng: np.random.Generator) -> tuple[Gate, ...]:
    """Uniformly random n-qubit Clifford as a gate word."""
    group = clifford_group(n)
    return group.words[group.sample(rng)]


def clifford_inverse(word: Sequence[Gate], n: int) -> tuple[Gate, ...]:
    """Shortest group word inverting `word` up to global phase."""
    group = clifford_group(n)
    return group.words[group.inverse(word)]
