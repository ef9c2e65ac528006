"""Exception types shared across the package.

Numerical failures carry enough context to be reported as machine readable
errors by the command line layer: ``ParameterError`` and expression problems
map to configuration failures, ``AccuracyError`` and its relatives map to
numerical failures.
"""

from __future__ import annotations


class SumRuleError(Exception):
    """Base class for all package errors."""


class ParameterError(SumRuleError):
    """A parameter is outside its documented range or of the wrong shape."""


class DomainError(SumRuleError):
    """An evaluation point lies outside the domain of definition."""


class UnsupportedKernelError(SumRuleError):
    """The requested kernel has no closed form for this boundary condition."""


class AccuracyError(SumRuleError):
    """A numerical routine could not meet the requested tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    achieved : float, optional
        Error estimate actually achieved, if known.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class BracketError(AccuracyError):
    """Root bracketing or refinement failed for an eigenvalue search."""


class ExpressionError(SumRuleError):
    """Problem with a density expression. Carries a byte offset into the text.

    Parameters
    ----------
    message : str
        Description of what was expected or what went wrong.
    offset : int
        0-based byte offset into the source text where the problem starts.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.bare_message = message


class ExpressionSyntaxError(ExpressionError):
    """The expression text does not match the grammar."""


class UnknownIdentifierError(ExpressionError):
    """An identifier in call position is not a known function."""


class UnboundParameterError(SumRuleError):
    """Evaluation referenced a parameter with no bound value."""


class NonFiniteResultError(DomainError):
    """Expression evaluation produced NaN or infinity."""
