"""Finite-dimensional quantum de Finetti toolkit for bosonic states."""

__version__ = "0.1.0"
