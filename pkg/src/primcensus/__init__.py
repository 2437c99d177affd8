"""Primes in arithmetic progressions with a fixed primitive root."""

__version__ = "1.0.0"
