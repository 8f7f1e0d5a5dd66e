"""Exact certificates for one-cusped arithmetic hyperbolic orbifolds."""

__version__ = "0.1.0"
