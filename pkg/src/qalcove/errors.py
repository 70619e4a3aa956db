"""Exception types shared across the package."""

from __future__ import annotations


class InvalidInput(ValueError):
    """Raised when caller-supplied data fails validation."""


class TheoremViolation(RuntimeError):
    """Raised when a structural guarantee checked at runtime fails to hold."""


class ResourceLimit(RuntimeError):
    """Raised when a search exceeds its configured budget."""
