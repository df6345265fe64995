"""Metric-based principal curves for one-dimensional manifold learning."""

__version__ = "0.1.0"
