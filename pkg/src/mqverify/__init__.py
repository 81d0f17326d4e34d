"""Exact verification of the finite-dimensional machinery behind moduli of
representations of multiplicative preprojective algebras."""

from __future__ import annotations

__version__ = "0.1.0"
