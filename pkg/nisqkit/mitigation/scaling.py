from __future__ import annotations

from nisqkit.circuits.circuit import Circuit
from nisqkit.core.errors import InputError, ParameterError


def scale_noise_identity_insertion(circuit: Circuit, factor: int) -> Circuit:
    """
    Amplify two-qubit gate noise by replacing each G with G (G^dag G)^n.

    Args:
        circuit: Bound circuit.
        factor: Odd amplification 2n + 1.

    Returns:
        Circuit: Logically equivalent circuit with factor times the two-qubit gates.
    """
    if factor < 1 or factor % 2 == 0:
        raise InputError(f"Scale factor must be an odd integer >= 1, got {factor}")
    if not circuit.is_bound:
        raise ParameterError("Identity insertion needs a bound circuit")
    repeats = (factor - 1) // 2
    ops = []
    for op in circuit.ops:
        ops.append(op)
        if op.arity == 2:
            ops.extend([op.adjoint(), op] * repeats)
    return circuit.with_ops(ops)
