"""Simulator of a Faraday-rotation atomic magnetometer inside a Mach-Zehnder
interferometer with postselected amplification of the rotation angle."""

__version__ = "0.1.0"
