"""Probabilistic error cancellation for Pauli noise."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.pauli import Observable, all_pauli_words, pauli_word_matrix, words_commute
from nisqkit.core.config import settings
from nisqkit.core.errors import InputError, RankDeficiencyError
from nisqkit.core.logging import get_logger
from nisqkit.models.mitigation import QuasiProbDecomposition, SampledEstimate
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.channels import Channel, pauli_rates_of
from nisqkit.noise.trajectories import _depolarized, _run_trajectory, _Site

logger = get_logger(__name__)

EIGENVALUE_TOL = 1e-12


def _commutation_signs(k: int) -> np.ndarray:
    words = all_pauli_words(k)
    return np.array([[1.0 if words_commute(p, q) else -1.0 for q in words] for p in words])


def transfer_eigenvalues(rates: dict[str, float], k: int) -> np.ndarray:
    """f_P = sum_Q s(P, Q) p_Q in IXYZ word order."""
    p = np.array([rates.get(w, 0.0) for w in all_pauli_words(k)])
    return _commutation_signs(k) @ p


def pec_decompose(channel: Channel) -> QuasiProbDecomposition:
    """
    Quasi-probability decomposition of the inverse of a Pauli channel.

    Each transfer eigenvalue f_P is inverted and the result re-expanded over
    Pauli conjugations: q_Q = 4^-k sum_P s(P, Q) / f_P.

    Raises:
        InputError: The channel is not a Pauli channel.
        RankDeficiencyError: A transfer eigenvalue vanishes.
    """
    k = channel.arity
    rates = pauli_rates_of(channel)
    f = transfer_eigenvalues(rates, k)
    if np.min(np.abs(f)) < EIGENVALUE_TOL:
        raise RankDeficiencyError(f"Channel '{channel.name}' has a vanishing transfer eigenvalue {np.min(np.abs(f)):.3e}")
    q = _commutation_signs(k) @ (1.0 / f) / len(f)
    decomposition = QuasiProbDecomposition(n_qubits=k, coefficients=dict(zip(all_pauli_words(k), q.tolist())))
    logger.debug(f"PEC for '{channel.name}': Q = {decomposition.overhead:.6f}")
    return decomposition


def apply_decomposition(decomposition: QuasiProbDecomposition, rho: np.ndarray) -> np.ndarray:
    """sum_k q_k P_k rho P_k on a dense matrix."""
    out = np.zeros_like(rho, dtype=complex)
    for word, q in decomposition.coefficients.items():
        p = pauli_word_matrix(word)
        out += q * (p @ rho @ p)
    return out


@dataclass(frozen=True)
class _PECSite:
    site: _Site
    error_probs: np.ndarray
    # Correction draw: |q| / Q, with its sign and Q.
    correction_probs: np.ndarray | None
    signs: np.ndarray | None
    overhead: float


def _sites(circuit: Circuit, noise: NoiseModel, decompositions, mitigate: bool) -> list[_PECSite]:
    raw = [
        (k, channel, targets)
        for k, op in enumerate(circuit.ops)
        for channel, targets in noise.channels_for(op)
    ]
    if decompositions is not None and len(decompositions) != len(raw):
        raise InputError(f"Expected {len(raw)} decompositions (one per noise site), got {len(decompositions)}")
    out = []
    for i, (k, channel, targets) in enumerate(raw):
        words = tuple(all_pauli_words(channel.arity))
        rates = pauli_rates_of(channel)
        error_probs = np.array([rates.get(w, 0.0) for w in words])
        site = _Site(k, tuple(targets), words, error_probs / error_probs.sum())
        if not mitigate:
            out.append(_PECSite(site, site.probs, None, None, 1.0))
            continue
        decomposition = decompositions[i] if decompositions is not None else pec_decompose(channel)
        if decomposition.n_qubits != channel.arity:
            raise InputError(f"Decomposition on {decomposition.n_qubits} qubits for a {channel.arity}-qubit channel")
        q = np.array([decomposition.coefficients.get(w, 0.0) for w in words])
        overhead = float(np.sum(np.abs(q)))
        out.append(_PECSite(site, site.probs, np.abs(q) / overhead, np.sign(q), overhead))
    return out


def _run_shard(circuit, params, sites: list[_PECSite], obs: Observable, samples: int, rng):
    n_sites = len(sites)
    net = np.zeros((samples, n_sites), dtype=np.int64)
    weights = np.ones(samples)
    for s, pec in enumerate(sites):
        errors = rng.choice(len(pec.site.words), size=samples, p=pec.error_probs)
        if pec.correction_probs is None:
            net[:, s] = errors
            continue
        corrections = rng.choice(len(pec.site.words), size=samples, p=pec.correction_probs)
        # Digits of the IXYZ index are 2-bit symplectic labels, so XOR multiplies words up to phase.
        net[:, s] = errors ^ corrections
        weights *= pec.signs[corrections] * pec.overhead
    if n_sites:
        unique, inverse = np.unique(net, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
    else:
        unique, inverse = net[:1], np.zeros(samples, dtype=int)
    plain = [p.site for p in sites]
    values = np.array([_run_trajectory(circuit, params, plain, pattern).expectation(obs) for pattern in unique])
    return weights * values[inverse]


def _signed_monte_carlo(circuit, noise, obs, samples, rng, params, decompositions, mitigate, threads, shard_size):
    if samples < 2:
        raise InputError("Need at least 2 samples")
    obs.check_width(circuit.n_qubits)
    if not circuit.is_bound:
        circuit.check_params(params)
    sites = _sites(circuit, noise, decompositions, mitigate)
    shard_size = shard_size or settings.MC_SHARD_SIZE
    sizes = [min(shard_size, samples - start) for start in range(0, samples, shard_size)]
    children = rng.spawn(len(sizes))

    def run(k: int):
        return _run_shard(circuit, params, sites, obs, sizes[k], children[k])

    workers = max(1, min(threads or settings.THREADS, len(sizes)))
    if workers == 1:
        shards = [run(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(run, range(len(sizes))))
    values = np.concatenate(shards)
    mean = _depolarized(obs, float(values.mean()), noise.global_depolarizing)
    stderr = float(values.std(ddof=1) / np.sqrt(samples))
    overhead = float(np.prod([s.overhead for s in sites])) if sites else 1.0
    return SampledEstimate(estimate=mean, stderr=stderr, samples=samples, overhead=overhead)


def pec_estimate(
    circuit: Circuit,
    noise: NoiseModel,
    obs: Observable,
    samples: int,
    rng: np.random.Generator,
    decompositions: Sequence[QuasiProbDecomposition] | None = None,
    params: Sequence[float] | None = None,
    *,
    threads: int | None = None,
    shard_size: int | None = None,
) -> SampledEstimate:
    """
    Mitigated expectation by sampling inverse-channel insertions.

    Every noise site draws its physical Pauli error and a correction word with
    probability |q| / Q; each sample is weighted by the product of sgn(q) * Q.
    Trajectories are evaluated exactly on the state vector.

    Args:
        circuit: Circuit to run.
        noise: Pauli noise model.
        obs: Observable to estimate.
        samples: Number of Monte Carlo samples.
        rng: Master generator; shards use spawned children.
        decompositions: One decomposition per noise site in circuit order;
            derived from the noise model when omitted.
        params: Parameter values.
        threads: Worker count.
        shard_size: Samples per shard.

    Returns:
        SampledEstimate: Mitigated mean, standard error and total overhead Q.
    """
    result = _signed_monte_carlo(circuit, noise, obs, samples, rng, params, decompositions, True, threads, shard_size)
    logger.info(f"PEC estimate {result.estimate:.6f} +/- {result.stderr:.6f} (Q = {result.overhead:.4f})")
    return result


def unmitigated_estimate(
    circuit: Circuit,
    noise: NoiseModel,
    obs: Observable,
    samples: int,
    rng: np.random.Generator,
    params: Sequence[float] | None = None,
    *,
    threads: int | None = None,
    shard_size: int | None = None,
) -> SampledEstimate:
    """Same sampler as pec_estimate without corrections, for overhead comparison."""
    return _signed_monte_carlo(circuit, noise, obs, samples, rng, params, None, False, threads, shard_size)
