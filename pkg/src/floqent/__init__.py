"""Steady-state entanglement of two driven, dissipatively coupled qubits."""
__version__ = "0.1.0"
