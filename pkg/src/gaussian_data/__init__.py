"""Gaussian free-field data, the linear wave propagator and the stochastic-time process."""
