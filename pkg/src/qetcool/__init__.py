"""Exact simulation of correlation-enhanced algorithmic cooling on small qubit systems."""

__version__ = "0.1.0"
