"""Sparse recovery of Laplace eigenfunction expansions on surfaces of revolution."""

__version__ = "0.1.0"
