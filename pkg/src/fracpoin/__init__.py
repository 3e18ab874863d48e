"""Fractional Sobolev seminorms and fractional Poincare constants on 1D/2D domains."""

__version__ = "0.1.0"
