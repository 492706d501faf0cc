"""Reliability audit toolkit for meta-analyses of ratio estimates."""

__version__ = "0.1.0"
