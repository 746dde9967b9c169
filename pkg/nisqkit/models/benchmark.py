"""Pydantic models for benchmarking protocols."""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

DEFAULT_LENGTHS = [2, 4, 8, 16, 32, 64, 128, 256]


def _check_lengths(value: List[int]) -> List[int]:
    if len(value) < 3:
        raise ValueError("Need at least 3 sequence lengths")
    if len(set(value)) != len(value) or min(value) < 1:
        raise ValueError("Sequence lengths must be distinct and >= 1")
    return sorted(value)


class RBConfig(BaseModel):
    """Clifford randomized-benchmarking schedule."""

    n_qubits: Literal[1, 2] = Field(1, description="Register width")
    lengths: List[int] = Field(default_factory=lambda: list(DEFAULT_LENGTHS), description="Sequence lengths m")
    sequences: int = Field(30, ge=1, description="Random sequences K_m per length")
    shots: int = Field(1000, ge=0, description="Shots per sequence; 0 uses exact survival probabilities")
    compile_cliffords: bool = Field(
        True, description="Run each Clifford as one gate so gate noise fires once per Clifford"
    )

    class Config:
        json_schema_extra = {"example": {"n_qubits": 1, "lengths": [1, 5, 10, 20, 50], "sequences": 30, "shots": 1000}}

    @field_validator("lengths")
    @classmethod
    def check_lengths(cls, value):
        return _check_lengths(value)


class XEBConfig(BaseModel):
    """Cross-entropy benchmarking schedule."""

    n_qubits: Literal[1, 2] = Field(1, description="1 for single-qubit gates, 2 for the two-qubit cycle")
    lengths: List[int] = Field(default_factory=lambda: list(DEFAULT_LENGTHS), description="Sequence lengths / cycles m")
    sequences: int = Field(30, ge=1, description="Random sequences K_m per length")
    shots: int = Field(1000, ge=0, description="Shots per sequence; 0 uses exact distributions")

    class Config:
        json_schema_extra = {"example": {"n_qubits": 2, "lengths": [1, 2, 4, 8, 16], "sequences": 20, "shots": 0}}

    @field_validator("lengths")
    @classmethod
    def check_lengths(cls, value):
        return _check_lengths(value)


class DecayFit(BaseModel):
    """Fit of mean survivals to A p^m + B."""

    a: float = Field(..., description="A_0")
    p: float = Field(..., description="Decay parameter")
    b: float = Field(..., description="B_0")
    residual: float = Field(..., description="Sum of squared residuals")
    points: List[Tuple[float, float]] = Field(..., description="(m, mean survival) points")
    flags: List[str] = Field(default_factory=list)


class RBResult(BaseModel):
    fit: DecayFit
    error_rate: float = Field(..., description="r = (2^n - 1) / 2^n * (1 - p)")


class XEBResult(BaseModel):
    alphas: List[Tuple[int, float]] = Field(..., description="(m, mean alpha) per length")
    fit: DecayFit
    error_rate: float = Field(..., description="r = (N - 1) / N * (1 - p)")
    pauli_error: float = Field(..., description="r_P = (N - 1) / N * r")
    single_qubit_fits: List[DecayFit] = Field(default_factory=list, description="Per-qubit fits in two-qubit mode")
    gate_decay: Optional[float] = Field(None, description="Cycle decay divided by both single-qubit decays")
    gate_error_rate: Optional[float] = None


class LinearXEBResult(BaseModel):
    fidelity: float = Field(..., description="2^n <p(x_i)> - 1")
    stderr: float
    samples: int


class QVWidthResult(BaseModel):
    width: int
    depth: int
    heavy_probabilities: List[float] = Field(..., description="h_U per circuit")
    mean_heavy_probability: float
    passed: bool
    achieved_depth: int = Field(..., description="d(m): the depth when the width passes, else 0")
    max_infidelity: Optional[float] = Field(None, description="Largest 1 - F_avg of routed circuits")


class QVResult(BaseModel):
    widths: List[QVWidthResult]
    log2_volume: int = Field(..., description="argmax_m min(m, d(m))")


class MirrorResult(BaseModel):
    polarizations: List[float]
    polarization: float = Field(..., description="Mean polarization over randomizations")
    survivals: List[float]
