"""Frequency lattice, truncation profiles, projectors, field containers and spatial norms."""
