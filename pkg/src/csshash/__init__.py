"""Simulation and verification toolkit for two-universal hashing QKD over random CSS codes."""

__version__ = "0.1.0"
