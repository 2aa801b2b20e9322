"""Compactly supported smooth box extensions and their Fourier-side checks."""

__version__ = "0.1.0"
