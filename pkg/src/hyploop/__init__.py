"""Certified hyperbolic length bounds for loops on punctured bordered surfaces."""
__version__ = "0.1.0"
