"""Multiple stochastic integrals: kernels, Wick evaluation, contractions, products and moment checks."""
