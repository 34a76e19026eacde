"""Desk-scale tools for back-and-forth relations, Scott rank and trees of tuples."""

__version__ = "0.1.0"
