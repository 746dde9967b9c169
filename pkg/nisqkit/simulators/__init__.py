"""Pure-state simulators: dense state vector, Schrodinger-Feynman, MPS and PEPS."""
