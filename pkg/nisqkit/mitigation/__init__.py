"""Error-mitigation methods operating on noisy expectation values."""
