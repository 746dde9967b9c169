"""Service layer for the command line."""
