"""Hybrid quantum-classical sentiment analysis on a statevector simulator."""
__version__ = "0.1.0"
