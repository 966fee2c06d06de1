"""Numerical laboratory for cotype-type constants of vector-valued polynomials on the polytorus."""

__version__ = "0.1.0"
