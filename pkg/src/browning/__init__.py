"""Enzymic-browning defect extraction and grading for Golden Delicious apples."""

__version__ = "0.1.0"
