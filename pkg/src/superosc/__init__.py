"""First integrals, superintegrable metrics and Lienard equivalence for y'' + delta (n+1) y^n = 0."""

__version__ = "0.1.0"
