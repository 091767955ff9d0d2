"""Exact simulation of lossless 1-1 quantum data compression in Fock space."""

__version__ = "0.1.0"
