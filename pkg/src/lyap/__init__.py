"""Exact symbolic-numeric computation of Lyapunov constants, center
certification, and certified lower bounds on small-amplitude limit cycles
for planar polynomial (in particular Kolmogorov) systems."""

__version__ = "0.1.0"
