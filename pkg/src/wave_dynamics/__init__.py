"""Truncated Hamiltonian flow, Duhamel operator, stochastic objects, para-products and remainders."""
