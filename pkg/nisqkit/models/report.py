"""Request and report models for the command line."""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"

Backend = Literal["sv", "mps", "peps", "density", "mc", "feynman"]
Task = Literal["amplitude", "sample", "expectation", "probabilities"]
Protocol = Literal["rb", "xeb", "qv", "mirror", "rqc-xeb"]
MitigationMethod = Literal[
    "zne",
    "zne-richardson",
    "zne-exponential",
    "zne-polyexp",
    "zne-lsq",
    "pec",
    "mem-invert",
    "mem-calibrate",
    "vd",
    "symmetry",
    "qse",
    "cdr",
]
CompilePass = Literal["fuse", "route", "cnot-synth"]


class SimulateRequest(BaseModel):
    """Inputs of the simulate command."""

    circuit: str = Field(..., description="Circuit text")
    backend: Backend = Field("sv", description="Simulator backend")
    task: Task = Field("amplitude", description="What to compute")
    bits: Optional[str] = Field(None, description="Output bitstring for amplitude tasks; qubit 0 first")
    observable: Optional[str] = Field(None, description="Observable text, one 'coeff WORD' term per line")
    shots: int = Field(1000, ge=1, description="Samples for sample tasks and Monte Carlo expectations")
    params: Optional[List[float]] = Field(None, description="Values for symbolic parameter slots")
    noise: Optional[Dict[str, Any]] = Field(None, description="Noise model for the density and mc backends")
    max_bond: Optional[int] = Field(None, ge=1, description="MPS bond cap")
    truncation: Optional[float] = Field(None, ge=0, description="MPS discarded-weight threshold")
    grid: Optional[str] = Field(None, description="PEPS grid as HxV; qubit = row * H + col")
    partition: Optional[List[int]] = Field(None, description="Qubits of the first half for the feynman backend")

    class Config:
        json_schema_extra = {
            "example": {"circuit": "qreg q[2];\nh q[0];\ncx q[0],q[1];\n", "backend": "sv", "task": "amplitude", "bits": "00"}
        }


class BenchmarkRequest(BaseModel):
    """Inputs of the benchmark command."""

    protocol: Protocol
    noise: Optional[Dict[str, Any]] = Field(None, description="Noise model; noiseless when omitted")
    n_qubits: int = Field(1, ge=1, description="Register width for RB/XEB; base width for mirror circuits")
    lengths: Optional[List[int]] = Field(None, description="Sequence lengths or cycle counts")
    sequences: int = Field(30, ge=1, description="Random sequences per length")
    shots: Optional[int] = Field(
        None, ge=0, description="Shots per circuit; 0 uses exact distributions; RB/XEB default to 1000"
    )
    max_width: int = Field(4, ge=2, description="Largest Quantum Volume width")
    circuits_per_width: int = Field(100, ge=1)
    route: Optional[str] = Field(None, description="Coupling family for routed QV runs: 'line' or 'complete'")
    circuit: Optional[str] = Field(None, description="Clifford base circuit text for mirror circuits")
    repetitions: int = Field(10, ge=1, description="Mirror randomizations")
    grid: str = Field("2x2", description="RQC grid as HxV")
    cycles: int = Field(8, ge=0, description="RQC cycles")
    samples: int = Field(10000, ge=1, description="RQC samples for linear XEB")

    class Config:
        json_schema_extra = {"example": {"protocol": "rb", "n_qubits": 1, "lengths": [1, 5, 10, 20], "sequences": 30}}


class MitigateRequest(BaseModel):
    """Inputs of the mitigate command."""

    method: MitigationMethod
    data: Dict[str, Any] = Field(default_factory=dict, description="Method-specific data file contents")
    circuit: Optional[str] = Field(None, description="Circuit text for methods that run a circuit")
    noise: Optional[Dict[str, Any]] = None
    observable: Optional[str] = None
    samples: int = Field(10000, ge=1, description="Monte Carlo samples for PEC")
    factors: List[int] = Field(default_factory=lambda: [1, 3, 5], description="Identity-insertion scale factors")
    copies: int = Field(2, ge=1, description="Copies M for virtual distillation")
    symmetry: Optional[str] = Field(None, description="Pauli word of the symmetry")
    sector: int = Field(1, description="Symmetry eigenvalue +1 or -1")
    expansion: Optional[List[str]] = Field(None, description="Pauli words spanning the QSE subspace")
    training: int = Field(20, ge=2, description="CDR training circuits")

    class Config:
        json_schema_extra = {
            "example": {"method": "zne-richardson", "data": {"points": [{"scale": 1, "value": 0.8}, {"scale": 3, "value": 0.55}]}}
        }


class CompileRequest(BaseModel):
    """Inputs of the compile command."""

    circuit: str
    graph: Optional[str] = Field(None, description="Coupling description or edge-list text")
    passes: List[CompilePass] = Field(default_factory=lambda: ["fuse"], description="Passes applied in order")
    lookahead: float = Field(0.0, ge=0.0, description="Next-layer weight of the router")


class VQARequest(BaseModel):
    """Inputs of the vqa command."""

    problem: Literal["qaoa", "vqe"]
    graph: Optional[str] = Field(None, description="MaxCut edge list for QAOA")
    p: int = Field(1, ge=1, description="QAOA depth")
    hamiltonian: Optional[str] = Field(None, description="Observable text for VQE")
    layers: int = Field(1, ge=1, description="Hardware-efficient ansatz layers")
    optimizer: Dict[str, Any] = Field(default_factory=dict, description="OptimizerConfig fields")


class RunReport(BaseModel):
    """Machine-readable record of one command."""

    schema_version: str = Field(SCHEMA_VERSION, description="Report schema version")
    command: str = Field(..., description="Subcommand name")
    arguments: Dict[str, Any] = Field(default_factory=dict, description="Echo of the resolved options")
    seed: int
    backend: Optional[str] = None
    wall_clock: float = Field(..., ge=0.0, description="Seconds spent in the command")
    results: Dict[str, Any] = Field(default_factory=dict, description="Command payload")

    class Config:
        json_schema_extra = {
            "example": {
                "schema_version": SCHEMA_VERSION,
                "command": "simulate",
                "arguments": {"backend": "sv", "task": "amplitude", "bits": "00"},
                "seed": 1234,
                "backend": "sv",
                "wall_clock": 0.01,
                "results": {"amplitude": [0.7071067811865476, 0.0]},
            }
        }
