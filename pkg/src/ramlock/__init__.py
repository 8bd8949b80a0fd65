"""Ramification bounds for torsion crystalline representations via Breuil-Kisin style phi-modules."""

from __future__ import annotations

from .errors import ComputationError, InputError, RamlockError

__version__ = "0.1.0"

__all__ = ["ComputationError", "InputError", "RamlockError", "__version__"]
