"""Solvers for the three constraint families."""
