from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.core.errors import DivergenceError
from nisqkit.core.logging import get_logger
from nisqkit.models.vqa import Iterate, OptimizationTrace, OptimizerConfig
from nisqkit.vqa.gradients import gradient
from nisqkit.vqa.loss import LossSpec, loss

logger = get_logger(__name__)

ZERO_GRADIENT = 1e-14


def optimize(spec: LossSpec, theta0: Sequence[float], config: OptimizerConfig | None = None) -> OptimizationTrace:
    """
    Plain gradient descent theta <- theta - eta * grad.

    Args:
        spec: Loss to minimize.
        theta0: Starting parameters.
        config: Optimizer settings.

    Returns:
        OptimizationTrace: Every iterate, starting with theta0.

    Raises:
        DivergenceError: The loss increased config.divergence_window times in a row.
    """
    config = config or OptimizerConfig()
    theta = spec.check(theta0).copy()
    current = loss(spec, theta)
    trace = OptimizationTrace()
    increases = 0
    for iteration in range(config.max_iterations):
        grad = gradient(spec, theta, config.method, config.fd_step)
        grad_norm = float(np.linalg.norm(grad))
        trace.iterates.append(Iterate(iteration=iteration, params=theta.tolist(), loss=current, grad_norm=grad_norm))
        if grad_norm < ZERO_GRADIENT:
            trace.converged, trace.reason = True, "zero gradient"
            break
        theta = theta - config.step_size * grad
        new = loss(spec, theta)
        increases = increases + 1 if new > current else 0
        if increases >= config.divergence_window:
            raise DivergenceError(f"Loss increased {increases} consecutive steps (now {new:.6g})")
        change, current = abs(new - current), new
        if change < config.tolerance:
            trace.iterates.append(Iterate(iteration=iteration + 1, params=theta.tolist(), loss=current, grad_norm=grad_norm))
            trace.converged, trace.reason = True, "loss change below tolerance"
            break
    else:
        trace.iterates.append(
            Iterate(iteration=config.max_iterations, params=theta.tolist(), loss=current, grad_norm=float("nan"))
        )
        trace.reason = "iteration limit"
    logger.info(f"Optimization stopped after {len(trace.iterates)} iterates: {trace.reason}, loss {current:.10g}")
    return trace
