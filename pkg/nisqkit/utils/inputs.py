"""Parsing helpers shared by the services."""

from typing import Any, Dict, Optional

from pydantic import ValidationError

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.pauli import Observable, parse_observable
from nisqkit.circuits.qasm import parse_circuit
from nisqkit.core.errors import InputError
from nisqkit.models.noise import NoiseModel


def load_noise(data: Optional[Dict[str, Any]]) -> NoiseModel:
    """Validate a noise-model mapping; None gives the noiseless model."""
    if data is None:
        return NoiseModel()
    try:
        return NoiseModel.model_validate(data)
    except ValidationError as e:
        raise InputError(f"Error in noise model: {str(e)}") from e


def require_circuit(text: Optional[str], what: str) -> Circuit:
    if not text:
        raise InputError(f"{what} needs a circuit")
    return parse_circuit(text)


def require_observable(text: Optional[str], what: str) -> Observable:
    if not text:
        raise InputError(f"{what} needs an observable")
    return parse_observable(text)


def parse_grid(text: str) -> tuple[int, int]:
    """'HxV' -> (H, V)."""
    try:
        n_h, n_v = (int(p) for p in text.lower().split("x"))
    except ValueError as e:
        raise InputError(f"Grid must look like HxV, got '{text}'") from e
    if n_h < 1 or n_v < 1:
        raise InputError(f"Grid dimensions must be positive, got '{text}'")
    return n_h, n_v


def complex_pair(value: complex) -> list[float]:
    """JSON-friendly [re, im]."""
    return [float(value.real), float(value.imag)]
