"""Exact Schur-block statistics and finite-size bounds for relative-entropy estimation."""

__version__ = "0.1.0"
