"""Numerical lab for the truncated, renormalized Hartree wave equation on the 3-torus."""

__version__ = "0.3.0"
