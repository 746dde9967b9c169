from __future__ import annotations

import numpy as np

from nisqkit.circuits.pauli import Observable
from nisqkit.core.errors import InputError, NumericalError
from nisqkit.noise.density import SquashedDensityState, as_density_matrix

PURITY_FLOOR = 1e-12


def vd_estimate(rho: SquashedDensityState | np.ndarray, obs: Observable, copies: int) -> float:
    """
    Virtual distillation Tr(rho^M O) / Tr(rho^M), computed from matrix powers.

    Args:
        rho: Noisy state.
        obs: Observable.
        copies: M >= 1.

    Raises:
        NumericalError: Tr(rho^M) below 1e-12.
    """
    if copies < 1:
        raise InputError(f"Number of copies must be >= 1, got {copies}")
    matrix = as_density_matrix(rho)
    obs.check_width(int(matrix.shape[0]).bit_length() - 1)
    power = np.linalg.matrix_power(matrix, copies)
    norm = np.trace(power).real
    if norm < PURITY_FLOOR:
        raise NumericalError(f"Tr(rho^{copies}) = {norm:.3e} is too small to normalize")
    return float(np.trace(power @ obs.to_matrix()).real / norm)
