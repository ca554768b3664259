"""pwss: exact-rational perverse weight spectral sequence toolkit."""

__version__ = "0.1.0"
