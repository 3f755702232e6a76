"""Probabilistic toolkit for in-degree constrained orientations of random regular graphs."""

__version__ = "0.1.0"
