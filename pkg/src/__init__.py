"""Varying-coefficient screening - NIS, Conditional-INIS and Greedy-INIS for ultra-high-dimensional data."""

__version__ = "1.0.0"
