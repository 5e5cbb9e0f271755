"""Entropy invariants of spaces with a convex geodesic bicombing."""

__version__ = "0.1.0"
