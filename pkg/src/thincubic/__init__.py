"""Exact computations for thin families of binary cubic forms."""
__version__ = "0.1.0"
