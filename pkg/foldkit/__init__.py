"""Dimension folding for matrix-valued predictors."""

__version__ = "1.0.0"
