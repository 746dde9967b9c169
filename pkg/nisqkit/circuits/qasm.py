"""Text format for circuits: a small OpenQASM-2-like subset.

    qreg q[N];                     exactly once, first
    h q[0]; rx(pi/2) q[1];         named gates, angles as literals, pi
                                   multiples or symbolic slots (theta, -theta,
                                   0.5*theta)
    cx q[0],q[1]; ccz q[0],q[1],q[2];
    unitary(re,im,...) q[0];       raw matrix, row-major
    barrier;                       no-op
    param theta, phi;              optional, after qreg and before any gate:
                                   fixes slot order and count
"""

from __future__ import annotations

import math

import numpy as np
import pyparsing as pp

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.gates import ARITY, PARAMETRIC, Gate, GateKind, Parameter
from nisqkit.core.errors import CircuitSyntaxError, InputError, QubitIndexError, UnknownGateError

_GATE_NAMES = {k.value: k for k in GateKind}

_ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
_number = pp.pyparsing_common.fnumber
_integer = pp.pyparsing_common.integer
_PI = pp.Keyword("pi")
_LPAR, _RPAR, _LBRA, _RBRA, _SEMI, _COMMA = map(pp.Suppress, "()[];,")

_atom = pp.Group(
    pp.Optional(pp.Literal("-"))("neg")
    + (
        (_number("coef") + pp.Optional(pp.Suppress("*") + (_PI("pi") | _ident("name"))))
        | _PI("pi")
        | _ident("name")
    )
    + pp.Optional(pp.Suppress("/") + _number("div"))
)
_qubit = pp.Group(_ident("reg") + _LBRA + _integer("index") + _RBRA)
_qreg = pp.Group(pp.Keyword("qreg")("decl") + _ident("reg") + _LBRA + _integer("size") + _RBRA + _SEMI)
_params = pp.Group(pp.Keyword("param")("declare") + pp.Group(pp.DelimitedList(_ident))("names") + _SEMI)
_gate = pp.Group(
    _ident("gate")
    + pp.Optional(_LPAR + pp.Group(pp.DelimitedList(_atom))("args") + _RPAR)
    + pp.Optional(pp.Group(pp.DelimitedList(_qubit))("qubits"))
    + _SEMI
)
_header = pp.Suppress(
    pp.Optional(pp.Keyword("OPENQASM") + _number + _SEMI)
    + pp.ZeroOrMore(pp.Keyword("include") + pp.QuotedString("\"") + _SEMI)
)
_statement = pp.Group(pp.Located(_qreg | _params | _gate))
_program = _header + pp.ZeroOrMore(_statement)
_program.ignore(pp.cpp_style_comment)


def _where(text: str, loc: int) -> tuple[int, int]:
    return pp.lineno(loc, text), pp.col(loc, text)


def _angle(atom, slots: dict[str, int]) -> float | Parameter:
    sign = -1.0 if atom.get("neg") else 1.0
    coef = float(atom["coef"]) if "coef" in atom else 1.0
    div = float(atom["div"]) if "div" in atom else 1.0
    value = sign * coef / div
    if "pi" in atom:
        return value * math.pi
    if "name" in atom:
        name = atom["name"]
        index = slots.setdefault(name, len(slots))
        return Parameter(index, name, value)
    return value


def parse_circuit(text: str) -> Circuit:
    """
    Parse circuit source into a Circuit.

    Args:
        text: Source in the circuit grammar.

    Returns:
        Circuit: Gates in source order; symbolic angles get slots in
            `param` order, then first-appearance order.
    """
    try:
        statements = _program.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise CircuitSyntaxError(f"Syntax error: {e.msg}", e.lineno, e.col) from e

    n_qubits = None
    reg_name = None
    slots: dict[str, int] = {}
    ops: list[Gate] = []
    for located in statements:
        loc, stmt = located[0], located[1][0]
        line, col = _where(text, loc)
        if "decl" in stmt:
            if n_qubits is not None:
                raise CircuitSyntaxError("Second qreg declaration", line, col)
            if ops:
                raise CircuitSyntaxError("qreg must come first", line, col)
            reg_name, n_qubits = stmt["reg"], int(stmt["size"])
            if n_qubits < 1:
                raise CircuitSyntaxError("Register must have at least one qubit", line, col)
            continue
        if "declare" in stmt:
            if n_qubits is None:
                raise CircuitSyntaxError("Missing qreg declaration", line, col)
            if ops or slots:
                raise CircuitSyntaxError("param must follow qreg and precede every gate", line, col)
            for declared in stmt["names"]:
                if declared == "pi":
                    raise CircuitSyntaxError("'pi' cannot name a parameter", line, col)
                if declared in slots:
                    raise CircuitSyntaxError(f"Parameter '{declared}' declared twice", line, col)
                slots[declared] = len(slots)
            continue
        name = stmt["gate"]
        if n_qubits is None:
            raise CircuitSyntaxError("Missing qreg declaration", line, col)
        qubits = []
        for q in stmt.get("qubits", []):
            if q["reg"] != reg_name:
                raise CircuitSyntaxError(f"Unknown register '{q['reg']}'", line, col)
            if not 0 <= q["index"] < n_qubits:
                raise QubitIndexError(
                    f"Qubit index {q['index']} out of range for {reg_name}[{n_qubits}] (line {line}, column {col})"
                )
            qubits.append(int(q["index"]))
        if name == "barrier":
            continue
        kind = _GATE_NAMES.get(name)
        if kind is None:
            raise UnknownGateError(f"Unknown gate '{name}' (line {line}, column {col})")
        args = list(stmt.get("args", []))
        try:
            if kind is GateKind.RAW:
                values = [float(_angle(a, {})) for a in args]
                dim = 1 << len(qubits)
                if len(values) != 2 * dim * dim:
                    raise CircuitSyntaxError(f"unitary on {len(qubits)} qubits needs {2 * dim * dim} numbers", line, col)
                flat = np.array(values[0::2]) + 1j * np.array(values[1::2])
                ops.append(Gate(kind, tuple(qubits), matrix=flat.reshape(dim, dim)))
                continue
            if len(qubits) != ARITY.get(kind, 1):
                raise CircuitSyntaxError(f"{name} needs {ARITY.get(kind, 1)} qubits, got {len(qubits)}", line, col)
            if kind in PARAMETRIC:
                if len(args) != 1:
                    raise CircuitSyntaxError(f"{name} needs one angle", line, col)
                ops.append(Gate(kind, tuple(qubits), _angle(args[0], slots)))
            else:
                if args:
                    raise CircuitSyntaxError(f"{name} takes no angle", line, col)
                ops.append(Gate(kind, tuple(qubits)))
        except (CircuitSyntaxError, QubitIndexError):
            raise
        except (InputError, TypeError) as e:
            raise CircuitSyntaxError(str(e), line, col) from e
    if n_qubits is None:
        raise CircuitSyntaxError("Missing qreg declaration", 1, 1)
    names = tuple(sorted(slots, key=slots.get))
    return Circuit(n_qubits, tuple(ops), len(slots), names)


def _render_angle(param: float | Parameter, names: tuple[str, ...]) -> str:
    if isinstance(param, Parameter):
        name = names[param.index]
        if param.scale == 1.0:
            return name
        if param.scale == -1.0:
            return f"-{name}"
        return f"{param.scale!r}*{name}"
    return repr(float(param))


def render_circuit(circuit: Circuit) -> str:
    """Inverse of parse_circuit."""
    lines = [f"qreg q[{circuit.n_qubits}];"]
    if circuit.n_params:
        lines.append(f"param {', '.join(circuit.param_names)};")
    for op in circuit.ops:
        qubits = ",".join(f"q[{t}]" for t in op.targets)
        if op.kind is GateKind.RAW:
            flat = op.matrix.reshape(-1)
            nums = ",".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in flat)
            lines.append(f"unitary({nums}) {qubits};")
        elif op.param is not None:
            lines.append(f"{op.kind.value}({_render_angle(op.param, circuit.param_names)}) {qubits};")
        else:
            lines.append(f"{op.kind.value} {qubits};")
    return "\n".join(lines) + "\n"
