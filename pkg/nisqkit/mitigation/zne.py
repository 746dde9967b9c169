"""Zero-noise extrapolation."""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np
from scipy import linalg

from nisqkit.core.errors import FitError, InputError, RankDeficiencyError
from nisqkit.core.logging import get_logger
from nisqkit.models.mitigation import LeastSquaresResult, NoisyExpectation, RichardsonResult

logger = get_logger(__name__)

Point = tuple[float, float] | NoisyExpectation


def _scalar_points(points: Sequence[Point]) -> tuple[np.ndarray, np.ndarray]:
    scales, values = [], []
    for p in points:
        if isinstance(p, NoisyExpectation):
            if isinstance(p.scale, list):
                raise InputError("Expected a scalar noise scale")
            scales.append(p.scale)
            values.append(p.value)
        else:
            scales.append(p[0])
            values.append(p[1])
    if not scales:
        raise InputError("No data points")
    return np.asarray(scales, dtype=float), np.asarray(values, dtype=float)


def richardson_coefficients(scales: Sequence[float]) -> np.ndarray:
    """gamma_i = prod_{j != i} lambda_j / (lambda_j - lambda_i)."""
    lam = np.asarray(scales, dtype=float)
    if len(np.unique(lam)) != len(lam):
        raise InputError(f"Noise scales must be distinct, got {lam.tolist()}")
    gammas = np.ones(len(lam))
    for i in range(len(lam)):
        for j in range(len(lam)):
            if j != i:
                gammas[i] *= lam[j] / (lam[j] - lam[i])
    return gammas


def zne_richardson(points: Sequence[Point]) -> RichardsonResult:
    """
    Richardson extrapolation through n+1 points (lambda_i, value_i).

    Cancels the first n orders of the noise expansion, so polynomial data of
    degree <= n is extrapolated exactly.
    """
    lam, values = _scalar_points(points)
    gammas = richardson_coefficients(lam)
    estimate = float(gammas @ values)
    logger.debug(f"Richardson over scales {lam.tolist()}: gamma {gammas.tolist()}")
    return RichardsonResult(
        estimate=estimate, gammas=gammas.tolist(), variance_amplification=float(np.sum(gammas**2))
    )


def zne_exponential(first: Point, second: Point) -> float:
    """
    Two-point exponential extrapolation under <O>(mu) = A exp(-f mu).

    Args:
        first: (mu, <O>(mu)).
        second: (lambda * mu, <O>(lambda * mu)) with lambda > 1.

    Returns:
        float: A = (<O>(mu)^lambda / <O>(lambda mu))^(1 / (lambda - 1)).
    """
    (mu, v1), (mu2, v2) = zip(*_scalar_points([first, second]))
    if mu <= 0 or mu2 <= mu:
        raise InputError(f"Need 0 < mu < lambda * mu, got {mu} and {mu2}")
    if v1 == 0 or v2 == 0 or np.sign(v1) != np.sign(v2):
        raise InputError(f"Exponential model needs two nonzero values of equal sign, got {v1} and {v2}")
    lam = mu2 / mu
    sign = np.sign(v1)
    log_a = (lam * np.log(abs(v1)) - np.log(abs(v2))) / (lam - 1)
    return float(sign * np.exp(log_a))


def zne_polyexp(points: Sequence[Point], degree: int) -> float:
    """
    Poly-exponential extrapolation: fit ln|value| to ln A + sum_{i=1..d} f_i lambda^i.

    Returns:
        float: sign * A.
    """
    lam, values = _scalar_points(points)
    if degree < 0:
        raise InputError("Degree must be non-negative")
    if len(lam) < degree + 1:
        raise FitError(f"Degree {degree} needs at least {degree + 1} points, got {len(lam)}", list(zip(lam, values)))
    if np.any(values == 0) or len(set(np.sign(values))) != 1:
        raise InputError("Poly-exponential model needs nonzero values of one sign")
    coeffs = np.polynomial.polynomial.polyfit(lam, np.log(np.abs(values)), degree)
    return float(np.sign(values[0]) * np.exp(coeffs[0]))


def monomial_exponents(n_vars: int, order: int) -> list[tuple[int, ...]]:
    """Exponent vectors of all monomials of total degree <= order, constant first."""
    out = []
    for degree in range(order + 1):
        for combo in combinations_with_replacement(range(n_vars), degree):
            exps = [0] * n_vars
            for v in combo:
                exps[v] += 1
            out.append(tuple(exps))
    return out


def zne_least_squares(points: Sequence[tuple[Sequence[float], float] | NoisyExpectation], order: int) -> LeastSquaresResult:
    """
    Least-squares fit of values to a polynomial in one or more noise parameters.

    The first fitted coefficient is the zero-noise value.

    Raises:
        RankDeficiencyError: Too few points or a rank-deficient design matrix.
    """
    rows, values = [], []
    for p in points:
        if isinstance(p, NoisyExpectation):
            rows.append(np.atleast_1d(np.asarray(p.scale, dtype=float)))
            values.append(p.value)
        else:
            rows.append(np.atleast_1d(np.asarray(p[0], dtype=float)))
            values.append(float(p[1]))
    if not rows or len({r.shape for r in rows}) != 1:
        raise InputError("Noise-parameter vectors must share one length")
    x = np.vstack(rows)
    exponents = monomial_exponents(x.shape[1], order)
    design = np.column_stack([np.prod(x ** np.array(e), axis=1) for e in exponents])
    if design.shape[0] < design.shape[1] or np.linalg.matrix_rank(design) < design.shape[1]:
        raise RankDeficiencyError(
            f"Design matrix {design.shape} has rank {np.linalg.matrix_rank(design)}, need {design.shape[1]}"
        )
    coeffs, *_ = linalg.lstsq(design, np.asarray(values))
    return LeastSquaresResult(
        estimate=float(coeffs[0]),
        coefficients=coeffs.tolist(),
        exponents=exponents,
        condition_number=float(np.linalg.cond(design)),
    )
