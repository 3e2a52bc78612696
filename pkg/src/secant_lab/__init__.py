"""Numerical laboratory for Gabor frames and sampling with hyperbolic-secant windows."""

__version__ = "0.1.0"
