"""Hyperentanglement purification and concentration with cavity-NV parity checks."""

__version__ = "0.1.0"
