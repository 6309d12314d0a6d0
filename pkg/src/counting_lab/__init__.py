"""Exact lattice enumeration for counting and weighted-sum estimates, pairings and the sine-cancellation check."""
