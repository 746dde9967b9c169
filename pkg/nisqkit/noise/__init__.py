"""Noisy simulation: channels, squashed density states and Pauli Monte Carlo."""
