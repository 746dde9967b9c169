"""Pydantic models for noise-model description files."""
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from nisqkit.circuits.gates import Gate
from nisqkit.core.errors import InputError
from nisqkit.noise.channels import Channel, make_channel, pauli_channel, pauli_rates_of

ChannelKind = Literal[
    "depolarizing",
    "two_qubit_depolarizing",
    "global_depolarizing",
    "bit_flip",
    "phase_flip",
    "amplitude_damping",
    "pauli",
]

# Wildcard keys matching every gate of a given arity.
ARITY_KEYS = {1: "1q", 2: "2q", 3: "3q"}


class ChannelSpec(BaseModel):
    """One channel constructor with its parameters."""

    kind: ChannelKind = Field(..., description="Channel family")
    p: Optional[float] = Field(None, ge=0.0, le=1.0, description="Error probability (depolarizing, flips)")
    gamma: Optional[float] = Field(None, ge=0.0, le=1.0, description="Damping rate (amplitude_damping)")
    rates: Optional[Dict[str, float]] = Field(None, description="Pauli word -> probability (pauli)")
    qubits: Optional[int] = Field(None, ge=1, description="Width of a global_depolarizing channel; defaults to the gate arity")

    @model_validator(mode="after")
    def check_parameters(self):
        needs = {"amplitude_damping": "gamma", "pauli": "rates"}.get(self.kind, "p")
        if getattr(self, needs) is None:
            raise ValueError(f"Channel '{self.kind}' needs '{needs}'")
        return self

    def build(self, arity: int = 1) -> Channel:
        if self.kind == "amplitude_damping":
            return make_channel(self.kind, self.gamma)
        if self.kind == "pauli":
            return make_channel(self.kind, self.rates)
        if self.kind == "global_depolarizing":
            return make_channel(self.kind, self.p, self.qubits or arity)
        return make_channel(self.kind, self.p)


class NoiseModel(BaseModel):
    """
    Noise attached to gates.

    Channels fire after every gate whose name (or arity wildcard ``1q``/``2q``/``3q``)
    matches a key; idle qubits accrue no noise. A channel narrower than its gate is
    applied to each target separately.
    """

    channels: Dict[str, List[ChannelSpec]] = Field(
        default_factory=dict, description="Gate name or arity wildcard -> channels applied after it"
    )
    pauli_rates: Dict[str, Dict[str, float]] = Field(
        default_factory=dict, description="Gate name or arity wildcard -> Pauli error rates inserted after it"
    )
    readout: Dict[int, Tuple[float, float]] = Field(
        default_factory=dict, description="Qubit -> (P(read 1 | 0), P(read 0 | 1))"
    )
    global_depolarizing: float = Field(
        0.0, ge=0.0, le=1.0, description="Fraction of the output state replaced by the maximally mixed state"
    )

    class Config:
        json_schema_extra = {
            "example": {
                "channels": {"cx": [{"kind": "depolarizing", "p": 0.01}], "1q": [{"kind": "amplitude_damping", "gamma": 0.001}]},
                "pauli_rates": {"h": {"I": 0.99, "X": 0.01}},
                "readout": {"0": [0.02, 0.05]},
                "global_depolarizing": 0.0,
            }
        }

    @field_validator("pauli_rates")
    @classmethod
    def check_rates(cls, value):
        for key, rates in value.items():
            if any(p < 0 for p in rates.values()):
                raise ValueError(f"Negative Pauli rate for '{key}'")
            if abs(sum(rates.values()) - 1.0) > 1e-9:
                raise ValueError(f"Pauli rates for '{key}' sum to {sum(rates.values())}, expected 1")
        return value

    @field_validator("readout")
    @classmethod
    def check_readout(cls, value):
        for q, (p01, p10) in value.items():
            if not (0 <= p01 <= 1 and 0 <= p10 <= 1):
                raise ValueError(f"Readout rates for qubit {q} must lie in [0, 1]")
        return value

    @property
    def is_noiseless(self) -> bool:
        return not (self.channels or self.pauli_rates or self.readout or self.global_depolarizing)

    def _keys(self, gate: Gate) -> list[str]:
        return [gate.kind.value, ARITY_KEYS.get(gate.arity, "")]

    def channels_for(self, gate: Gate) -> list[tuple[Channel, tuple[int, ...]]]:
        """Channels to apply after a gate, each with the qubits it acts on."""
        out = []
        for key in self._keys(gate):
            for spec in self.channels.get(key, []):
                out.extend(_place(spec.build(gate.arity), gate))
            if key in self.pauli_rates:
                out.extend(_place(pauli_channel(self.pauli_rates[key]), gate))
        return out

    def pauli_rates_for(self, gate: Gate) -> list[tuple[dict[str, float], tuple[int, ...]]]:
        """Pauli error tables to sample after a gate; every attached channel must be a Pauli channel."""
        out = []
        for channel, targets in self.channels_for(gate):
            try:
                out.append((pauli_rates_of(channel), targets))
            except InputError as e:
                raise InputError(f"Monte Carlo mode needs Pauli noise on '{gate.kind.value}': {str(e)}") from e
        return out

    def readout_rates(self, q: int) -> tuple[float, float]:
        return tuple(self.readout.get(q, (0.0, 0.0)))


def _place(channel: Channel, gate: Gate) -> list[tuple[Channel, tuple[int, ...]]]:
    if channel.arity == gate.arity:
        return [(channel, gate.targets)]
    if channel.arity == 1:
        return [(channel, (t,)) for t in gate.targets]
    raise InputError(f"{channel.arity}-qubit channel '{channel.name}' cannot follow {gate!r}")
