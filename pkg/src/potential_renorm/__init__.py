"""Interaction potential, Wick constant, renormalization multiplier and the renormalized nonlinearity."""
