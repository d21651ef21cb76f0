"""Exception hierarchy shared by the library and the CLI.

The CLI maps ValidationError to exit status 1 and NumericalError to exit status 2.
"""

from typing import Optional


class ParamresError(Exception):
    """Base class for all paramres errors."""


class ValidationError(ParamresError, ValueError):
    """Invalid parameters or violated preconditions."""


class ProfileFormatError(ValidationError):
    """A sampled frequency profile could not be ingested."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(ParamresError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy result."""


class NonConvergenceError(NumericalError):
    """Slice doubling did not converge below the slice cap."""


class NoBracketError(NumericalError):
    """A boundary bracket shows no sign change."""


class IndeterminateError(NumericalError):
    """The requested quantity is undefined for this input."""
