"""Exact structural identifiability of chemical reaction networks from stationary moments."""

__version__ = "0.1.0"
