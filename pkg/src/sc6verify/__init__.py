"""Computational checks around self-conjugate 6-cores and the ternary form
Q = 3x^2 + 32y^2 + 32yz + 32z^2."""

__version__ = "0.1.0"
