from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from nisqkit.circuits.gates import Gate, GateKind, Parameter
from nisqkit.core.errors import ParameterError, QubitIndexError


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate list over a fixed register, with symbolic parameter slots."""

    n_qubits: int
    ops: tuple[Gate, ...] = ()
    n_params: int = 0
    param_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise QubitIndexError("Circuit needs at least one qubit")
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        n_params = self.n_params
        for op in ops:
            if max(op.targets) >= self.n_qubits:
                raise QubitIndexError(f"{op!r} acts outside a {self.n_qubits}-qubit register")
            if isinstance(op.param, Parameter):
                n_params = max(n_params, op.param.index + 1)
        object.__setattr__(self, "n_params", n_params)
        given = list(self.param_names)
        names: list[str | None] = [given[k] if k < len(given) else None for k in range(n_params)]
        for op in ops:
            if isinstance(op.param, Parameter) and names[op.param.index] is None:
                names[op.param.index] = op.param.name
        taken = {n for n in names if n}
        if len(taken) != sum(1 for n in names if n):
            raise ParameterError(f"Parameter names must be distinct, got {names}")
        for k, n in enumerate(names):
            if n is None:
                n = f"theta{k}"
                while n in taken:
                    n += "_"
                names[k] = n
                taken.add(n)
        object.__setattr__(self, "param_names", tuple(names))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.n_qubits, self.n_params, self.ops) == (other.n_qubits, other.n_params, other.ops)

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.n_params, self.ops))

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        return self.extend(other.ops)

    def extend(self, ops: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n_qubits, self.ops + tuple(ops), self.n_params, self.param_names)

    def with_ops(self, ops: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n_qubits, tuple(ops), self.n_params, self.param_names)

    @property
    def is_bound(self) -> bool:
        return not any(op.is_symbolic for op in self.ops)

    def check_params(self, params: Sequence[float] | None) -> None:
        supplied = 0 if params is None else len(params)
        if supplied < self.n_params:
            raise ParameterError(f"Circuit has {self.n_params} parameters, got {supplied} values")

    def bind(self, params: Sequence[float] | None) -> "Circuit":
        """Replace every parameter slot with its concrete angle."""
        if self.is_bound:
            return self
        self.check_params(params)
        return Circuit(self.n_qubits, tuple(op.bind(params) for op in self.ops))

    def inverse(self) -> "Circuit":
        """Reversed gate order with each gate replaced by its adjoint."""
        return self.with_ops(op.adjoint() for op in reversed(self.ops))

    def unitary(self, params: Sequence[float] | None = None):
        """Dense unitary of the whole circuit (small widths only)."""
        from nisqkit.simulators.statevector import circuit_unitary

        return circuit_unitary(self, params)

    def parametric_ops(self) -> list[tuple[int, Gate]]:
        return [(k, op) for k, op in enumerate(self.ops) if op.is_symbolic]

    def count(self, arity: int) -> int:
        return sum(1 for op in self.ops if op.arity == arity)

    def kinds(self) -> set[GateKind]:
        return {op.kind for op in self.ops}


def inverse(circuit: Circuit) -> Circuit:
    return circuit.inverse()
