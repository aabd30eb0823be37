"""Spanning-tree universality toolkit for expander graphs."""

__version__ = "0.1.0"
