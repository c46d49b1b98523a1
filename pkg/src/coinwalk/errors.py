"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["ConfigError", "InvariantViolation", "StructureError"]


class ConfigError(ValueError):
    """A user-supplied configuration value failed validation."""


class StructureError(ValueError):
    """A graph or operator violates a structural requirement."""


class InvariantViolation(RuntimeError):
    """A numerical invariant (trace, positivity, normalization) broke beyond tolerance."""
