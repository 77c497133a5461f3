"""Linear decomposition attacks on group-based key exchange schemes."""

__version__ = "0.1.0"
