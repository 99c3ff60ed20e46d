"""Learning Clifford and T-depth-one circuits from measurement statistics."""

__version__ = "0.1.0"
