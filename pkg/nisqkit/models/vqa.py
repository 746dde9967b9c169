"""Pydantic models for variational optimization."""
from typing import List, Literal, Optional

from pydantic import BaseModel, Field

GradientMethod = Literal["fd1", "fd2", "pshift", "adjoint"]


class OptimizerConfig(BaseModel):
    """Gradient-descent settings."""

    step_size: float = Field(0.1, gt=0, description="Step size eta of theta <- theta - eta * grad")
    max_iterations: int = Field(200, ge=1, description="Iteration cap")
    method: GradientMethod = Field("adjoint", description="Gradient method")
    fd_step: float = Field(1e-4, gt=0, description="Finite-difference step delta")
    tolerance: float = Field(1e-10, ge=0, description="Stop when the loss changes by less than this")
    divergence_window: int = Field(10, ge=1, description="Consecutive loss increases treated as divergence")

    class Config:
        json_schema_extra = {
            "example": {"step_size": 0.1, "max_iterations": 200, "method": "adjoint", "fd_step": 1e-4, "tolerance": 1e-10}
        }


class Iterate(BaseModel):
    """One optimizer step."""

    iteration: int
    params: List[float]
    loss: float
    grad_norm: float


class OptimizationTrace(BaseModel):
    """Full iterate history of a gradient-descent run."""

    iterates: List[Iterate] = Field(default_factory=list)
    converged: bool = False
    reason: str = ""

    @property
    def final(self) -> Iterate:
        return self.iterates[-1]


class QAOAResult(BaseModel):
    """Outcome of a QAOA MaxCut run."""

    gammas: List[float] = Field(..., description="Cost-layer angles")
    betas: List[float] = Field(..., description="Mixer-layer angles")
    expected_cut: float = Field(..., description="<H_C> at the final angles")
    best_bitstring: str = Field(..., description="Sampled bitstring with the largest cut")
    best_cut: float = Field(..., description="Cut value of best_bitstring")
    max_cut: Optional[float] = Field(None, description="Exact maximum cut when the graph is small enough to enumerate")
    trace: OptimizationTrace
