"""Identifiability and estimation of Pauli noise from syndrome statistics."""

__version__ = "0.1.0"

from . import codes, estimate, fourier, gf2, identify, noise, pauli  # noqa: E402

__all__ = ["__version__", "codes", "estimate", "fourier", "gf2", "identify", "noise", "pauli"]
