"""Simulation and exact verification of Boolean functions under resampling dynamics."""

__version__ = "0.1.0"
