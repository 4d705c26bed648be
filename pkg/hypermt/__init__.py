"""Rearrangement energies, sharp kernel inequalities and Moser-Trudinger
functionals on hyperbolic space, as executable numerical checks."""

__version__ = "0.1.0"
