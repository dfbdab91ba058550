"""Numerical calculus of continuous Moufang transformations."""

__version__ = "0.1.0"
