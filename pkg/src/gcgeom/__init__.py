"""Generalized complex geometry with exact arithmetic."""

__version__ = "0.1.0"
