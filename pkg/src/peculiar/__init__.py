"""Peculiar modules for four-ended tangles, immersed curves and their invariants."""

__version__ = "0.1.0"
