"""Modular parametrizations of elliptic curves over Q"""

__version__ = "0.1.0"
