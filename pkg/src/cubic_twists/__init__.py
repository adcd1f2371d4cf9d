"""Numerical experiments with cubic Dirichlet twists of L-functions."""
__version__ = "0.1.0"
