"""Finite-geometry contextuality workbench for N-qubit Pauli operators."""

__version__ = "0.1.0"
