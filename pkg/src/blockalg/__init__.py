"""Exact computational models for one-dimensional isotropy blocks."""

__version__ = "0.1.0"
