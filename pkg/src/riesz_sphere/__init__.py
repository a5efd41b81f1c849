"""Riesz summability of Fourier-Laplace series on the unit sphere S^N."""

__version__ = "0.1.0"
