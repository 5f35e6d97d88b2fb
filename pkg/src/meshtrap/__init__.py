"""Phase transitions of l1 recovery via Gaussian widths of the descent set."""

__version__ = "0.1.0"
