"""Two-dimensional cluster variation method on a wrapped staggered grid."""

__version__ = "0.1.0"
