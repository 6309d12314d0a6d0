"""X^{s,b} norms of windowed trajectories and bilinear space-time diagnostics."""
