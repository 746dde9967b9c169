"""Pydantic models for configuration, results and reports."""
