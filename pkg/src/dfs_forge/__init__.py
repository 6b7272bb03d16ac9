"""Decoherence-free subspaces and subsystems under collective decoherence."""

__version__ = "0.1.0"
