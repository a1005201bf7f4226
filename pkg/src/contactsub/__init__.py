"""Numerical verification of contact-complex Riemannian submersion identities."""

__version__ = "0.1.0"
