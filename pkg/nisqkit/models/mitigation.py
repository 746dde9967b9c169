"""Pydantic models for error-mitigation inputs and results."""
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, computed_field, field_validator


class NoisyExpectation(BaseModel):
    """Expectation value measured at one noise setting."""

    value: float = Field(..., description="Measured expectation value")
    stderr: float = Field(0.0, ge=0.0, description="Standard error; 0 for exact values")
    scale: Union[float, List[float]] = Field(
        ..., description="Noise amplification factor, mean error count, or a vector of noise parameters"
    )

    class Config:
        json_schema_extra = {"example": {"value": 0.91, "stderr": 0.002, "scale": 1.0}}


class RichardsonResult(BaseModel):
    """Richardson extrapolation to zero noise."""

    estimate: float = Field(..., description="Zero-noise estimate sum_i gamma_i * value_i")
    gammas: List[float] = Field(..., description="Extrapolation coefficients")
    variance_amplification: float = Field(..., description="sum_i gamma_i^2, the extra-sample factor")


class LeastSquaresResult(BaseModel):
    """Multi-parameter polynomial fit of noisy expectations."""

    estimate: float = Field(..., description="Fitted value at zero noise")
    coefficients: List[float] = Field(..., description="Expansion coefficients, constant term first")
    exponents: List[Tuple[int, ...]] = Field(..., description="Monomial exponents matching coefficients")
    condition_number: float


class QuasiProbDecomposition(BaseModel):
    """Signed mixture of Pauli conjugations realizing the inverse of a Pauli channel."""

    n_qubits: int = Field(..., ge=1)
    coefficients: Dict[str, float] = Field(..., description="Pauli word -> quasi-probability q")

    class Config:
        json_schema_extra = {"example": {"n_qubits": 1, "coefficients": {"I": 1.125, "X": -0.125, "Y": 0.0, "Z": 0.0}}}

    @computed_field
    @property
    def overhead(self) -> float:
        """Q = sum_k |q_k|."""
        return float(sum(abs(q) for q in self.coefficients.values()))

    @computed_field
    @property
    def sampling_overhead(self) -> float:
        """Q^2, the sample-count multiplier."""
        return self.overhead**2


class SampledEstimate(BaseModel):
    """Monte Carlo estimate with its spread."""

    estimate: float
    stderr: float = Field(..., ge=0.0)
    samples: int
    overhead: float = Field(1.0, description="Product of per-site Q factors applied as weight")


class MEMResult(BaseModel):
    """Readout-corrected distribution."""

    probabilities: List[float] = Field(..., description="Estimated ideal distribution after clipping")
    raw: List[float] = Field(..., description="Unclipped solution of the linear system")
    clipped: bool = Field(..., description="True when negative entries were clipped and renormalized")
    condition_number: float


class SymmetryResult(BaseModel):
    """Expectation value projected onto a symmetry sector."""

    estimate: float
    sector_weight: float = Field(..., description="Tr(Pi_s rho)")
    overhead: float = Field(..., description="1 / Tr(Pi_s rho)")


class QSEResult(BaseModel):
    """Lowest eigenpair of the subspace-expanded problem."""

    energy: float
    coefficients: List[Tuple[float, float]] = Field(..., description="(real, imag) parts of the eigenvector")
    rank: int = Field(..., description="Number of overlap eigenvalues kept")


class CDRModel(BaseModel):
    """Linear map noisy -> ideal."""

    slope: float = Field(..., description="theta_1")
    intercept: float = Field(..., description="theta_2")

    @field_validator("slope", "intercept")
    @classmethod
    def finite(cls, value):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("CDR parameters must be finite")
        return value


class CDRResult(BaseModel):
    estimate: float
    raw: float
    model: CDRModel
    training: List[Tuple[float, float]] = Field(..., description="(noisy, ideal) training pairs")


class MitigationReport(BaseModel):
    """Outcome of one mitigation method as reported by the command line."""

    method: str
    estimate: Optional[float] = None
    stderr: float = 0.0
    overhead: Dict[str, float] = Field(default_factory=dict, description="Overhead metrics such as sum gamma^2 or Q^2")
    flags: List[str] = Field(default_factory=list, description="Clipping, rank and fallback notes")
    details: Dict[str, Any] = Field(default_factory=dict)
