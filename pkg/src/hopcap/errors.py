"""Exception types shared across the package."""
from __future__ import annotations

__all__ = ["HopcapError", "DomainError", "EvaluationError", "BracketError",
           "InfeasibleRegionError"]


class HopcapError(Exception):
    """Base class for package errors."""


class DomainError(HopcapError, ValueError):
    """Argument outside an operation's mathematical domain."""


class EvaluationError(HopcapError, ArithmeticError):
    """A numerical evaluation produced a non-finite or guarded value."""


class BracketError(HopcapError, ValueError):
    """Root bracket does not enclose a sign change."""


class InfeasibleRegionError(HopcapError, ValueError):
    """Solver iterates left the admissible parameter region."""
