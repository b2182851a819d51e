"""Exact complexity measures for Boolean functions on structured domains."""

__version__ = "0.1.0"
