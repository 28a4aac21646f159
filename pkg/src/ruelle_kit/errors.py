"""Exception hierarchy shared by every module."""

from __future__ import annotations


class RuelleKitError(Exception):
    """Base class for all library errors."""


class DomainError(RuelleKitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DivergenceError(RuelleKitError, ArithmeticError):
    """A series or constant that the caller asked for does not converge."""


class ConvergenceError(RuelleKitError, ArithmeticError):
    """The truncation budget ran out before the requested tolerance.

    The bound reached so far is kept in ``achieved_bound``.
    """

    def __init__(self, message: str, achieved_bound: float = float("inf")):
        super().__init__(message)
        self.achieved_bound = achieved_bound


class BudgetError(RuelleKitError):
    """A computation would exceed a hard cost cap."""


class BracketError(RuelleKitError, ArithmeticError):
    """Root bracketing failed."""


class ClassificationError(RuelleKitError, ValueError):
    """A finite word does not determine the class an operation needs."""


class DepthError(RuelleKitError, RecursionError):
    """Recursion depth cap exceeded."""


class MassLookupError(RuelleKitError, KeyError):
    """A measure table cannot provide the mass of a cylinder."""
