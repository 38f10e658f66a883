"""Numerical companion for fractional Laplacian commutator and extension estimates."""

__version__ = "0.1.0"
