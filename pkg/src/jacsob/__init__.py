"""Jacobi-expansion operators and Sobolev-space diagnostics on (0, pi)."""
