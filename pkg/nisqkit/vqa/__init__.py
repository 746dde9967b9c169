"""Variational algorithms: losses, gradients, optimizer and reference problems."""
