"""Minkowski question mark function: exact values, moments, Fourier-Stieltjes coefficients."""
__version__ = "0.1.0"
