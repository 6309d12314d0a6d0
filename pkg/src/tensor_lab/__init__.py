"""Tensor norms, deterministic tensor estimates and contracted random tensors."""
