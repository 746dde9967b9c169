"""Benchmarking protocols: RB, XEB, random circuits, quantum volume and mirror circuits."""
