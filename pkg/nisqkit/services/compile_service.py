from typing import Any, Dict, Optional

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.coupling import CouplingGraph
from nisqkit.circuits.qasm import render_circuit
from nisqkit.compiler.fusion import fuse_gates
from nisqkit.compiler.gf2 import cnot_to_matrix, matrix_to_cnot
from nisqkit.compiler.routing import route
from nisqkit.core.errors import InputError
from nisqkit.core.logging import get_logger
from nisqkit.models.report import CompileRequest

logger = get_logger(__name__)


class CompileService:
    """Service for running compilation passes over a circuit."""

    def run(self, request: CompileRequest, circuit: Circuit) -> Dict[str, Any]:
        """
        Apply the requested passes in order.

        Args:
            request: Passes, coupling graph and router options.
            circuit: Parsed circuit.

        Returns:
            Dict[str, Any]: Compiled circuit text and per-pass statistics.
        """
        graph: Optional[CouplingGraph] = CouplingGraph.from_text(request.graph) if request.graph else None
        stats = []
        layouts: Dict[str, Any] = {}
        for name in request.passes:
            before = len(circuit)
            if name == "fuse":
                circuit = fuse_gates(circuit)
                stats.append({"pass": name, "gates_before": before, "gates_after": len(circuit)})
            elif name == "route":
                if graph is None:
                    raise InputError("Routing needs --graph")
                routed = route(circuit, graph, lookahead=request.lookahead)
                circuit = routed.circuit
                layouts = {
                    "initial_layout": list(routed.initial_layout.physical),
                    "final_layout": list(routed.final_layout.physical),
                }
                stats.append({"pass": name, "gates_before": before, "gates_after": len(circuit), "swaps": routed.swaps})
            else:
                matrix = cnot_to_matrix(circuit)
                circuit = matrix_to_cnot(matrix)
                stats.append({"pass": name, "gates_before": before, "gates_after": len(circuit), "matrix": matrix.tolist()})
            logger.info(f"Pass {name}: {before} -> {len(circuit)} gates")
        return {"circuit": render_circuit(circuit), "passes": stats, **layouts}
