"""Compilation passes: gate fusion, CNOT synthesis and routing."""
