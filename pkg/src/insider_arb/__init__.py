"""Numerical verification engine for insider arbitrage under initial enlargement."""

__version__ = "0.1.0"
