from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from nisqkit.core.errors import FitError, InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.benchmark import DecayFit

logger = get_logger(__name__)

P_MAX = 1 + 1e-6
FLAT_SPREAD = 1e-12
MAX_EVALUATIONS = 10000


def _decay(m, a, p, b):
    return a * np.power(p, m) + b


def fit_exponential_decay(points: Sequence[tuple[float, float]]) -> DecayFit:
    """
    Fit mean survivals to A p^m + B by nonlinear least squares.

    Starts from B = min(alpha), A = alpha(first) - B and p from a log-linear
    regression of alpha - B. Flat data leaves p unidentifiable; it is reported
    as p = 1, A = 0 with a flag.

    Raises:
        FitError: The optimizer did not converge; carries the raw points.
    """
    if len(points) < 3:
        raise InputError(f"Decay fit needs at least 3 points, got {len(points)}")
    pts = sorted((float(m), float(v)) for m, v in points)
    m = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(y) < FLAT_SPREAD:
        logger.warning("Survivals are flat; decay parameter is unidentifiable")
        return DecayFit(a=0.0, p=1.0, b=float(y.mean()), residual=0.0, points=pts, flags=["p unidentifiable"])

    b0 = float(y.min())
    a0 = float(y[0] - b0)
    shifted = y - b0
    usable = shifted > FLAT_SPREAD
    if usable.sum() >= 2:
        slope, _ = np.polyfit(m[usable], np.log(shifted[usable]), 1)
        p0 = float(np.clip(np.exp(slope), 1e-3, 1.0))
    else:
        p0 = 0.9
    a0 = a0 / p0 ** m[0] if p0 > 0 else a0
    logger.debug(f"Decay fit start A={a0:.6g}, p={p0:.6g}, B={b0:.6g}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            (a, p, b), _ = curve_fit(
                _decay,
                m,
                y,
                p0=[a0, p0, b0],
                bounds=([-np.inf, 0.0, -np.inf], [np.inf, P_MAX, np.inf]),
                max_nfev=MAX_EVALUATIONS,
                ftol=1e-14,
                xtol=1e-14,
                gtol=1e-14,
            )
    except (RuntimeError, ValueError) as e:
        raise FitError(f"Error fitting exponential decay: {str(e)}", pts) from e
    residual = float(np.sum((_decay(m, a, p, b) - y) ** 2))
    flags = []
    if abs(a) < FLAT_SPREAD:
        flags.append("p unidentifiable")
    logger.info(f"Decay fit A={a:.6g}, p={p:.8g}, B={b:.6g}, residual {residual:.3e}")
    return DecayFit(a=float(a), p=float(p), b=float(b), residual=residual, points=pts, flags=flags)


def average_error_rate(p: float, n_qubits: int) -> float:
    """r = (2^n - 1) / 2^n * (1 - p)."""
    dim = 1 << n_qubits
    return (dim - 1) / dim * (1 - p)
