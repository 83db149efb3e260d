"""Equivariant shrinkage of a normal mean when |theta|/sigma is known to be at most m."""

__version__ = "0.1.0"
