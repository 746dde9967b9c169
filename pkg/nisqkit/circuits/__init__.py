"""Circuit representation, gate set, Pauli observables and the circuit text format."""
