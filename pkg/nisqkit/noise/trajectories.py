"""Pauli-error-insertion Monte Carlo over noiseless state-vector runs."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.pauli import Observable, pauli_word_matrix
from nisqkit.core.config import settings
from nisqkit.core.errors import InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.readout import flip_samples
from nisqkit.simulators.statevector import StateVector

logger = get_logger(__name__)


@dataclass
class MonteCarloResult:
    samples: list[str]
    # Observable index -> (mean, standard error) over trajectories.
    estimates: list[tuple[float, float]] = field(default_factory=list)
    unique_trajectories: int = 0


@dataclass(frozen=True)
class _Site:
    """One error location: after op `position`, on `targets`, drawing from `words`."""

    position: int
    targets: tuple[int, ...]
    words: tuple[str, ...]
    probs: np.ndarray


def error_sites(circuit: Circuit, noise: NoiseModel) -> list[_Site]:
    sites = []
    for k, op in enumerate(circuit.ops):
        for rates, targets in noise.pauli_rates_for(op):
            words = tuple(rates)
            probs = np.array([rates[w] for w in words], dtype=float)
            sites.append(_Site(k, tuple(targets), words, probs / probs.sum()))
    return sites


def _run_trajectory(circuit, params, sites, pattern) -> StateVector:
    state = StateVector(circuit.n_qubits, dtype=np.complex128)
    by_position: dict[int, list[tuple[_Site, int]]] = {}
    for site, choice in zip(sites, pattern):
        by_position.setdefault(site.position, []).append((site, int(choice)))
    for k, op in enumerate(circuit.ops):
        state.apply_gate(op, params)
        for site, choice in by_position.get(k, []):
            word = site.words[choice]
            if set(word) != {"I"}:
                state.apply_matrix(pauli_word_matrix(word), site.targets)
    return state


def _run_shard(circuit, params, sites, observables, shots, rng):
    patterns = np.zeros((shots, len(sites)), dtype=np.int16)
    for s, site in enumerate(sites):
        patterns[:, s] = rng.choice(len(site.words), size=shots, p=site.probs)
    if sites:
        unique, inverse, counts = np.unique(patterns, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)
    else:
        unique, inverse, counts = patterns[:1], np.zeros(shots, dtype=int), np.array([shots])
    values = np.zeros((len(unique), len(observables)))
    draws: list[list[str]] = []
    for u, pattern in enumerate(unique):
        state = _run_trajectory(circuit, params, sites, pattern)
        values[u] = [state.expectation(obs) for obs in observables]
        draws.append(state.sample(int(counts[u]), rng))
    # Each shot takes the next unused sample of its trajectory, keeping shot order.
    cursor = np.zeros(len(unique), dtype=int)
    samples = []
    for u in inverse:
        samples.append(draws[u][cursor[u]])
        cursor[u] += 1
    return samples, values[inverse], len(unique)


def run_pauli_mc(
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    rng: np.random.Generator,
    observables: Sequence[Observable] = (),
    params: Sequence[float] | None = None,
    *,
    threads: int | None = None,
    shard_size: int | None = None,
) -> MonteCarloResult:
    """
    Sample noisy runs by inserting random Pauli errors after each gate.

    Shots are split into fixed-size shards, each with its own child generator,
    so results do not depend on the worker count. Identical error patterns in a
    shard are simulated once.

    Args:
        circuit: Circuit to run.
        noise: Noise model; every channel must be a Pauli channel.
        shots: Number of error realizations.
        rng: Master generator.
        observables: Observables averaged over realizations.
        params: Parameter values.
        threads: Worker count; defaults to settings.THREADS.
        shard_size: Shots per shard; defaults to settings.MC_SHARD_SIZE.

    Returns:
        MonteCarloResult: One bitstring per shot (readout flips applied) and
            (mean, standard error) per observable.
    """
    if shots < 1:
        raise InputError("shots must be at least 1")
    for obs in observables:
        obs.check_width(circuit.n_qubits)
    if not circuit.is_bound:
        circuit.check_params(params)
    sites = error_sites(circuit, noise)
    shard_size = shard_size or settings.MC_SHARD_SIZE
    sizes = [min(shard_size, shots - start) for start in range(0, shots, shard_size)]
    children = rng.spawn(len(sizes))

    def run(k: int):
        return _run_shard(circuit, params, sites, list(observables), sizes[k], children[k])

    workers = max(1, min(threads or settings.THREADS, len(sizes)))
    if workers == 1:
        shards = [run(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(run, range(len(sizes))))

    samples = [s for shard in shards for s in shard[0]]
    values = np.concatenate([shard[1] for shard in shards], axis=0)
    estimates = []
    for j in range(len(observables)):
        column = values[:, j]
        stderr = float(column.std(ddof=1) / np.sqrt(shots)) if shots > 1 else 0.0
        estimates.append((float(column.mean()), stderr))
    if noise.global_depolarizing > 0:
        # Replace each shot by a uniform draw with probability f; expectations shrink by (1 - f) on non-identity terms.
        mix_rng = rng.spawn(1)[0]
        uniform = mix_rng.random(shots) < noise.global_depolarizing
        n = circuit.n_qubits
        for i in np.flatnonzero(uniform):
            samples[i] = "".join("1" if b else "0" for b in mix_rng.integers(0, 2, size=n))
        estimates = [
            (_depolarized(obs, mean, noise.global_depolarizing), err) for obs, (mean, err) in zip(observables, estimates)
        ]
    samples = flip_samples(samples, noise, rng.spawn(1)[0])
    unique = sum(shard[2] for shard in shards)
    logger.info(f"Pauli Monte Carlo: {shots} shots, {unique} distinct error patterns")
    return MonteCarloResult(samples, estimates, unique)


def _depolarized(obs: Observable, mean: float, fraction: float) -> float:
    identity = sum(t.coefficient for t in obs.terms if set(t.letters) == {"I"})
    return (1 - fraction) * (mean - identity) + identity
