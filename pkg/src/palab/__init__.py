"""Exact planar-diagram calculus for graded algebras over the Temperley-Lieb tower."""

__version__ = "0.1.0"
