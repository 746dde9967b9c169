"""Kraus channels, their superoperators and Pauli-transfer matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from nisqkit.circuits.pauli import all_pauli_words, pauli_word_matrix, words_commute
from nisqkit.core.errors import InputError

TP_TOL = 1e-10
RATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Channel:
    """CPTP map given by Kraus operators on k qubits."""

    kraus: tuple[np.ndarray, ...]
    name: str = "kraus"
    # Pauli error rates when the channel is a Pauli mixture.
    rates: Mapping[str, float] | None = None

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise InputError("Channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if dim & (dim - 1) or any(k.shape != (dim, dim) for k in ops):
            raise InputError("Kraus operators must be square with a power-of-two size")
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(dim))) > TP_TOL:
            raise InputError(f"Channel '{self.name}' is not trace preserving")
        object.__setattr__(self, "kraus", ops)

    @property
    def arity(self) -> int:
        return int(self.kraus[0].shape[0]).bit_length() - 1

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Dense action on a density matrix of matching size."""
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def then(self, other: "Channel") -> "Channel":
        """Composition: self first, then other."""
        return Channel(tuple(b @ a for a in self.kraus for b in other.kraus), f"{self.name}+{other.name}")


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InputError(f"{name} must lie in [0, 1], got {value}")
    return value


def identity(k: int = 1) -> Channel:
    return Channel((np.eye(1 << k, dtype=complex),), "identity")


def unitary_channel(u: np.ndarray) -> Channel:
    return Channel((np.asarray(u, dtype=complex),), "unitary")


def pauli_channel(rates: Mapping[str, float], name: str = "pauli") -> Channel:
    """
    Pauli channel rho -> sum_P p_P P rho P.

    Args:
        rates: Pauli words (all the same length) mapped to probabilities summing to 1.
    """
    if not rates:
        raise InputError("Pauli channel needs rates")
    widths = {len(w) for w in rates}
    if len(widths) != 1:
        raise InputError("Pauli rate words must share one length")
    probs = {w.upper(): _check_probability(f"rate[{w}]", p) for w, p in rates.items()}
    if abs(sum(probs.values()) - 1.0) > RATE_TOL:
        raise InputError(f"Pauli rates sum to {sum(probs.values())}, expected 1")
    kraus = tuple(np.sqrt(p) * pauli_word_matrix(w) for w, p in probs.items() if p > 0)
    return Channel(kraus, name, probs)


def depolarizing(p: float) -> Channel:
    """rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)."""
    p = _check_probability("p", p)
    return pauli_channel({"I": 1 - p, "X": p / 3, "Y": p / 3, "Z": p / 3}, "depolarizing")


def two_qubit_depolarizing(p: float) -> Channel:
    """rho -> (1-p) rho + p/15 sum over the 15 non-identity two-qubit Paulis."""
    p = _check_probability("p", p)
    rates = {w: p / 15 for w in all_pauli_words(2) if w != "II"}
    rates["II"] = 1 - p
    return pauli_channel(rates, "two_qubit_depolarizing")


def global_depolarizing(p: float, k: int = 1) -> Channel:
    """rho -> (1-p) rho + p I / 2^k on k qubits."""
    p = _check_probability("p", p)
    words = all_pauli_words(k)
    share = p / len(words)
    rates = {w: share for w in words}
    rates["I" * k] = 1 - p + share
    return pauli_channel(rates, "global_depolarizing")


def bit_flip(p: float) -> Channel:
    p = _check_probability("p", p)
    return pauli_channel({"I": 1 - p, "X": p}, "bit_flip")


def phase_flip(p: float) -> Channel:
    p = _check_probability("p", p)
    return pauli_channel({"I": 1 - p, "Z": p}, "phase_flip")


def amplitude_damping(gamma: float) -> Channel:
    gamma = _check_probability("gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return Channel((k0, k1), "amplitude_damping")


CHANNEL_KINDS = {
    "depolarizing": depolarizing,
    "two_qubit_depolarizing": two_qubit_depolarizing,
    "global_depolarizing": global_depolarizing,
    "bit_flip": bit_flip,
    "phase_flip": phase_flip,
    "amplitude_damping": amplitude_damping,
    "pauli": pauli_channel,
}


def make_channel(kind: str, *args, **kwargs) -> Channel:
    """Build a channel from the library by name."""
    try:
        factory = CHANNEL_KINDS[kind]
    except KeyError:
        raise InputError(f"Unknown channel kind '{kind}'. Choose from {sorted(CHANNEL_KINDS)}")
    return factory(*args, **kwargs)


def to_superop(channel: Channel) -> np.ndarray:
    """
    Superoperator M = sum_s K_s (x) conj(K_s) acting on the squashed vector.

    The first k qubits of M are the row (unprimed) indices and the last k the
    column (primed) indices of the flattened density matrix.
    """
    return sum(np.kron(k, k.conj()) for k in channel.kraus)


def pauli_transfer_matrix(channel: Channel) -> np.ndarray:
    """R[i, j] = Tr(P_i E(P_j)) / 2^k over Pauli words in IXYZ order."""
    k = channel.arity
    words = all_pauli_words(k)
    mats = [pauli_word_matrix(w) for w in words]
    images = [channel.apply(m) for m in mats]
    r = np.array([[np.trace(pi @ img) for img in images] for pi in mats]) / (1 << k)
    return r.real


def pauli_rates_of(channel: Channel, tol: float = 1e-10) -> dict[str, float]:
    """
    Pauli error rates of a Pauli channel.

    Inverts f_P = sum_Q s(P, Q) p_Q with s = +1 when P and Q commute and -1 otherwise.

    Raises:
        InputError: The channel is not diagonal in the Pauli-transfer picture.
    """
    if channel.rates is not None:
        return dict(channel.rates)
    ptm = pauli_transfer_matrix(channel)
    if np.max(np.abs(ptm - np.diag(np.diag(ptm)))) > tol:
        raise InputError(f"Channel '{channel.name}' is not a Pauli channel")
    words = all_pauli_words(channel.arity)
    f = np.diag(ptm)
    out = {}
    for q in words:
        signs = np.array([1.0 if words_commute(p, q) else -1.0 for p in words])
        out[q] = float(signs @ f) / len(words)
    return out
