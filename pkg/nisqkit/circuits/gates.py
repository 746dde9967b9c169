"""Standard gate set and dense gate matrices.

Angles use the half-angle convention: Rz(t) = diag(exp(-it/2), exp(it/2)).
Multi-qubit matrices index basis states with the first target as the most
significant bit, so CX(c, t) swaps |10> and |11>.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from nisqkit.core.errors import InputError, ParameterError

UNITARY_TOL = 1e-10


class GateKind(str, Enum):
    I = "id"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    CCZ = "ccz"
    RAW = "unitary"


ARITY = {
    GateKind.CX: 2,
    GateKind.CZ: 2,
    GateKind.SWAP: 2,
    GateKind.CCZ: 3,
}
PARAMETRIC = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})
SELF_ADJOINT = frozenset(
    {GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
     GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.CCZ}
)
ADJOINT_KIND = {
    GateKind.S: GateKind.SDG,
    GateKind.SDG: GateKind.S,
    GateKind.T: GateKind.TDG,
    GateKind.TDG: GateKind.T,
}
CLIFFORD = frozenset(
    {GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
     GateKind.SDG, GateKind.CX, GateKind.CZ, GateKind.SWAP}
)
# Generator of each Pauli rotation: R(t) = exp(-i t P / 2).
ROTATION_AXIS = {GateKind.RX: "X", GateKind.RY: "Y", GateKind.RZ: "Z"}

_S2 = np.sqrt(0.5)
FIXED_MATRICES: dict[GateKind, np.ndarray] = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
    GateKind.CX: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
    GateKind.CCZ: np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex),
}
for _m in FIXED_MATRICES.values():
    _m.flags.writeable = False


def rotation_matrix(kind: GateKind, angle: float) -> np.ndarray:
    """Dense matrix of a Pauli rotation in the half-angle convention."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)
    raise InputError(f"{kind.value} is not a rotation gate")


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """Check ||U^dag U - I||_max < tol."""
    eye = np.eye(matrix.shape[0])
    return bool(np.max(np.abs(matrix.conj().T @ matrix - eye)) < tol)


@dataclass(frozen=True)
class Parameter:
    """Reference to a parameter slot; the gate angle is scale * params[index]."""

    index: int
    name: str = ""
    scale: float = 1.0

    def __post_init__(self):
        if self.index < 0:
            raise ParameterError(f"Negative parameter slot {self.index}")
        if not self.name:
            object.__setattr__(self, "name", f"theta{self.index}")

    def resolve(self, params: Sequence[float] | None) -> float:
        if params is None or self.index >= len(params):
            raise ParameterError(f"Missing value for parameter '{self.name}' (slot {self.index})")
        return self.scale * float(params[self.index])


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate application: kind, ordered targets and an optional angle."""

    kind: GateKind
    targets: tuple[int, ...]
    param: float | Parameter | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(set(targets)) != len(targets):
            raise InputError(f"Repeated target in {kind.value}{targets}")
        if any(t < 0 for t in targets):
            raise InputError(f"Negative target in {kind.value}{targets}")

        if kind is GateKind.RAW:
            if self.matrix is None:
                raise InputError("Raw gate needs a matrix")
            matrix = np.array(self.matrix, dtype=complex)
            dim = 1 << len(targets)
            if matrix.shape != (dim, dim):
                raise InputError(f"Raw matrix shape {matrix.shape} does not match {len(targets)} targets")
            if not is_unitary(matrix):
                raise InputError("Raw matrix is not unitary")
            matrix.flags.writeable = False
            object.__setattr__(self, "matrix", matrix)
        elif self.matrix is not None:
            raise InputError(f"{kind.value} does not take a matrix")
        elif len(targets) != ARITY.get(kind, 1):
            raise InputError(f"{kind.value} acts on {ARITY.get(kind, 1)} qubits, got {len(targets)}")

        if kind in PARAMETRIC:
            if self.param is None:
                raise ParameterError(f"{kind.value} needs exactly one parameter")
            if not isinstance(self.param, Parameter):
                object.__setattr__(self, "param", float(self.param))
        elif self.param is not None:
            raise ParameterError(f"{kind.value} takes no parameter")

    @property
    def arity(self) -> int:
        return len(self.targets)

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.param, Parameter)

    def angle(self, params: Sequence[float] | None = None) -> float:
        """Concrete rotation angle, resolving a parameter slot if needed."""
        if isinstance(self.param, Parameter):
            return self.param.resolve(params)
        if self.param is None:
            raise ParameterError(f"{self.kind.value} has no angle")
        return self.param

    def bind(self, params: Sequence[float] | None) -> "Gate":
        if not self.is_symbolic:
            return self
        return Gate(self.kind, self.targets, self.angle(params))

    def adjoint(self) -> "Gate":
        if self.kind is GateKind.RAW:
            return Gate(GateKind.RAW, self.targets, matrix=self.matrix.conj().T)
        if self.kind in PARAMETRIC:
            if isinstance(self.param, Parameter):
                p = self.param
                return Gate(self.kind, self.targets, Parameter(p.index, p.name, -p.scale))
            return Gate(self.kind, self.targets, -self.param)
        return Gate(ADJOINT_KIND.get(self.kind, self.kind), self.targets)

    def with_targets(self, targets: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(targets), self.param, self.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.targets, self.param) != (other.kind, other.targets, other.param):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is other.matrix
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        return hash((self.kind, self.targets, self.param))

    def __repr__(self) -> str:
        args = ",".join(str(t) for t in self.targets)
        if self.param is None:
            return f"{self.kind.value.upper()}({args})"
        return f"{self.kind.value.upper()}[{self.param}]({args})"


def gate_matrix(gate: Gate, params: Sequence[float] | None = None) -> np.ndarray:
    """
    Dense unitary of a gate.

    Args:
        gate: Gate to evaluate.
        params: Values for parameter slots referenced by the gate.

    Returns:
        np.ndarray: 2^k x 2^k unitary, first target most significant.
    """
    if gate.kind is GateKind.RAW:
        return gate.matrix
    if gate.kind in PARAMETRIC:
        return rotation_matrix(gate.kind, gate.angle(params))
    return FIXED_MATRICES[gate.kind]


def permute_matrix(matrix: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """
    Reorder the qubit factors of a k-qubit operator.

    Args:
        matrix: Operator acting on qubits in positions 0..k-1.
        order: order[i] is the old position placed at new position i.

    Returns:
        np.ndarray: Operator acting on the reordered qubits.
    """
    k = len(order)
    t = matrix.reshape([2] * (2 * k))
    axes = list(order) + [k + o for o in order]
    return t.transpose(axes).reshape(1 << k, 1 << k)


# Builders for the common gates.

def i(q: int) -> Gate:
    return Gate(GateKind.I, (q,))


def x(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def y(q: int) -> Gate:
    return Gate(GateKind.Y, (q,))


def z(q: int) -> Gate:
    return Gate(GateKind.Z, (q,))


def h(q: int) -> Gate:
    return Gate(GateKind.H, (q,))


def s(q: int) -> Gate:
    return Gate(GateKind.S, (q,))


def sdg(q: int) -> Gate:
    return Gate(GateKind.SDG, (q,))


def t(q: int) -> Gate:
    return Gate(GateKind.T, (q,))


def tdg(q: int) -> Gate:
    return Gate(GateKind.TDG, (q,))


def rx(theta: float | Parameter, q: int) -> Gate:
    return Gate(GateKind.RX, (q,), theta)


def ry(theta: float | Parameter, q: int) -> Gate:
    return Gate(GateKind.RY, (q,), theta)


def rz(theta: float | Parameter, q: int) -> Gate:
    return Gate(GateKind.RZ, (q,), theta)


def cx(control: int, target: int) -> Gate:
    return Gate(GateKind.CX, (control, target))


def cz(a: int, b: int) -> Gate:
    return Gate(GateKind.CZ, (a, b))


def swap(a: int, b: int) -> Gate:
    return Gate(GateKind.SWAP, (a, b))


def ccz(a: int, b: int, c: int) -> Gate:
    return Gate(GateKind.CCZ, (a, b, c))


def raw(matrix: np.ndarray, *targets: int) -> Gate:
    return Gate(GateKind.RAW, tuple(targets), matrix=matrix)


def pauli_gate(letter: str, q: int) -> Gate:
    """Gate for a single Pauli letter."""
    return Gate(GateKind(letter.lower()) if letter != "I" else GateKind.I, (q,))
