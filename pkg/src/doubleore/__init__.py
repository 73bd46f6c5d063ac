"""Exact verification of double Ore extensions."""

__version__ = "0.1.0"
