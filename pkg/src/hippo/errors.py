"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["SingularSolveError", "SignalFormatError", "TimestampOrderError"]


class SingularSolveError(ValueError):
    """A linear system along the update path has no (stable) solution."""


class SignalFormatError(ValueError):
    """A signal file is malformed (header, arity, or non-numeric field)."""


class TimestampOrderError(ValueError):
    """Timestamps in a signal are not strictly increasing."""
