"""Symmetry expansion and quantum subspace expansion on density matrices."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import linalg

from nisqkit.circuits.pauli import Observable, PauliString, pauli_word_matrix
from nisqkit.core.errors import InputError, NumericalError
from nisqkit.core.logging import get_logger
from nisqkit.models.mitigation import QSEResult, SymmetryResult
from nisqkit.noise.density import SquashedDensityState, as_density_matrix

logger = get_logger(__name__)

SECTOR_FLOOR = 1e-12
OVERLAP_FLOOR = 1e-10


def project_sector(rho, symmetry: PauliString | str, sector: int) -> np.ndarray:
    """Pi_s rho Pi_s / Tr(Pi_s rho) with Pi_s = (I + s S) / 2."""
    matrix = as_density_matrix(rho)
    pi = _projector(symmetry, sector, matrix.shape[0])
    projected = pi @ matrix @ pi
    weight = np.trace(projected).real
    if weight < SECTOR_FLOOR:
        raise NumericalError(f"Sector weight {weight:.3e} vanishes")
    return projected / weight


def _projector(symmetry: PauliString | str, sector: int, dim: int) -> np.ndarray:
    letters = symmetry.letters if isinstance(symmetry, PauliString) else symmetry.upper()
    if sector not in (1, -1):
        raise InputError(f"Sector must be +1 or -1, got {sector}")
    if 1 << len(letters) != dim:
        raise InputError(f"Symmetry '{letters}' does not match a {dim}-dimensional state")
    return (np.eye(dim) + sector * pauli_word_matrix(letters)) / 2


def symmetry_expand(
    rho: SquashedDensityState | np.ndarray, obs: Observable, symmetry: PauliString | str, sector: int
) -> SymmetryResult:
    """
    Expectation under the state projected onto the symmetry sector s.

    Returns Tr(O Pi_s rho) / Tr(Pi_s rho) and the sampling-overhead proxy 1 / Tr(Pi_s rho).

    Raises:
        InputError: A term of the observable does not commute with the symmetry.
        NumericalError: The sector weight vanishes.
    """
    matrix = as_density_matrix(rho)
    symmetry = symmetry if isinstance(symmetry, PauliString) else PauliString(symmetry.upper())
    obs.check_width(symmetry.n_qubits)
    clash = [t.letters for t in obs.terms if not symmetry.commutes_with(t)]
    if clash:
        raise InputError(f"Observable terms {clash} do not commute with symmetry {symmetry.letters}")
    pi = _projector(symmetry, sector, matrix.shape[0])
    weight = float(np.trace(pi @ matrix).real)
    if weight < SECTOR_FLOOR:
        raise NumericalError(f"Sector weight {weight:.3e} vanishes")
    value = float(np.trace(obs.to_matrix() @ pi @ matrix).real) / weight
    return SymmetryResult(estimate=value, sector_weight=weight, overhead=1.0 / weight)


def qse_solve(rho: SquashedDensityState | np.ndarray, hamiltonian: Observable, expansion: Sequence[str]) -> QSEResult:
    """
    Lowest eigenvalue of H c = E B c over the span of P_i applied to rho.

    H_ij = Tr(rho P_i H P_j) and B_ij = Tr(rho P_i P_j). Overlap eigenvalues
    below 1e-10 are projected out before the reduced problem is solved.

    Args:
        rho: State to expand around.
        hamiltonian: Observable H.
        expansion: Pauli words, including the identity.
    """
    matrix = as_density_matrix(rho)
    n = int(matrix.shape[0]).bit_length() - 1
    hamiltonian.check_width(n)
    words = [w.upper() for w in expansion]
    if "I" * n not in words:
        raise InputError("Expansion set must include the identity")
    ops = [pauli_word_matrix(w) for w in words]
    h = hamiltonian.to_matrix()
    size = len(ops)
    h_sub = np.empty((size, size), dtype=complex)
    b_sub = np.empty((size, size), dtype=complex)
    for i, pi in enumerate(ops):
        for j, pj in enumerate(ops):
            h_sub[i, j] = np.trace(matrix @ pi @ h @ pj)
            b_sub[i, j] = np.trace(matrix @ pi @ pj)
    h_sub = (h_sub + h_sub.conj().T) / 2
    b_sub = (b_sub + b_sub.conj().T) / 2
    w, v = linalg.eigh(b_sub)
    keep = w > OVERLAP_FLOOR
    if not np.any(keep):
        raise NumericalError("Overlap matrix is numerically zero")
    t = v[:, keep] / np.sqrt(w[keep])
    energies, vectors = linalg.eigh(t.conj().T @ h_sub @ t)
    coefficients = t @ vectors[:, 0]
    logger.debug(f"QSE kept {int(keep.sum())} of {size} expansion directions")
    return QSEResult(
        energy=float(energies[0]),
        coefficients=[(float(c.real), float(c.imag)) for c in coefficients],
        rank=int(keep.sum()),
    )
