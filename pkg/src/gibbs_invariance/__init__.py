"""Truncated Gibbs measure sampling and invariance diagnostics."""
