"""Clifford data regression."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import PARAMETRIC, Gate, GateKind
from nisqkit.circuits.pauli import Observable
from nisqkit.core.errors import FitError, InputError, ParameterError
from nisqkit.core.logging import get_logger
from nisqkit.models.mitigation import CDRModel, CDRResult
from nisqkit.models.noise import NoiseModel
from nisqkit.noise.density import run_density
from nisqkit.simulators.statevector import simulate

logger = get_logger(__name__)

DEGENERATE_SPREAD = 1e-12
QUARTER = np.pi / 2
# T = Rz(pi/4) up to phase, so it snaps to either neighbour.
_T_SNAPS = {GateKind.T: (GateKind.I, GateKind.S), GateKind.TDG: (GateKind.I, GateKind.SDG)}


def cdr_fit(pairs: Sequence[tuple[float, float]]) -> CDRModel:
    """
    Least-squares fit of ideal = slope * noisy + intercept.

    Raises:
        FitError: All noisy values coincide.
    """
    if len(pairs) < 2:
        raise InputError(f"CDR needs at least 2 training pairs, got {len(pairs)}")
    noisy = np.array([p[0] for p in pairs], dtype=float)
    ideal = np.array([p[1] for p in pairs], dtype=float)
    spread = np.sum((noisy - noisy.mean()) ** 2)
    if spread < DEGENERATE_SPREAD:
        raise FitError("CDR training set has no spread in noisy values", [tuple(p) for p in pairs])
    slope = float(np.sum((noisy - noisy.mean()) * (ideal - ideal.mean())) / spread)
    intercept = float(ideal.mean() - slope * noisy.mean())
    return CDRModel(slope=slope, intercept=intercept)


def cdr_apply(model: CDRModel, noisy: float) -> float:
    return model.slope * noisy + model.intercept


def _snap_angle(angle: float, rng: np.random.Generator, width: float) -> float:
    """Random multiple of pi/2 weighted by exp(-(distance / width)^2), nearest most likely."""
    nearest = np.round(angle / QUARTER)
    candidates = nearest + np.arange(-2, 3)
    weights = np.exp(-(((candidates * QUARTER - angle) / width) ** 2))
    return float(rng.choice(candidates, p=weights / weights.sum()) * QUARTER)


def near_clifford_circuits(
    circuit: Circuit, count: int, rng: np.random.Generator, width: float = np.pi / 4
) -> list[Circuit]:
    """
    Training circuits with every non-Clifford rotation snapped to a multiple of pi/2.

    Args:
        circuit: Bound circuit to imitate.
        count: Number of training circuits.
        rng: Snapping generator.
        width: Spread of the snapping distribution; small widths always pick the nearest multiple.
    """
    if not circuit.is_bound:
        raise ParameterError("CDR needs a bound circuit")
    out = []
    for _ in range(count):
        ops = []
        for op in circuit.ops:
            if op.kind in PARAMETRIC:
                ops.append(Gate(op.kind, op.targets, _snap_angle(op.angle(), rng, width)))
            elif op.kind in _T_SNAPS:
                ops.append(Gate(_T_SNAPS[op.kind][int(rng.integers(2))], op.targets))
            else:
                ops.append(op)
        out.append(circuit.with_ops(ops))
    return out


def cdr_mitigate(
    circuit: Circuit,
    noise: NoiseModel,
    obs: Observable,
    rng: np.random.Generator,
    n_training: int = 20,
    training: Sequence[Circuit] | None = None,
) -> CDRResult:
    """
    Fit the noisy -> ideal map on near-Clifford training circuits and correct the target.

    Noisy values come from the density simulator, ideal ones from the state vector.
    """
    circuits = list(training) if training is not None else near_clifford_circuits(circuit, n_training, rng)
    pairs = [
        (run_density(c, noise).expectation(obs), simulate(c).expectation(obs))
        for c in circuits
    ]
    model = cdr_fit(pairs)
    raw = run_density(circuit, noise).expectation(obs)
    estimate = cdr_apply(model, raw)
    logger.info(f"CDR: slope {model.slope:.6f}, intercept {model.intercept:.6f}, {raw:.6f} -> {estimate:.6f}")
    return CDRResult(estimate=estimate, raw=raw, model=model, training=pairs)
