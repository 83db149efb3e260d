"""Exception hierarchy shared by the kernel, the estimators and the CLI."""

from __future__ import annotations

from typing import Any


class SnrboundError(Exception):
    """Base class for every error raised by snrbound."""


class DomainError(SnrboundError, ValueError):
    """An argument lies outside the domain of the operation (negative z, s2 <= 0, ...)."""


class EvaluationError(SnrboundError, ArithmeticError):
    """A numerical evaluation failed to converge or overflowed.

    The offending parameters are kept on ``params`` so callers can report them.
    """

    def __init__(self, message: str, **params: Any) -> None:
        self.params = params
        if params:
            detail = ", ".join(f"{key}={value!r}" for key, value in params.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class ConfigurationError(SnrboundError, ValueError):
    """An estimator spec or prior is invalid for the problem it is used with."""


class IdentityTruncationAdvisory(UserWarning):
    """Truncating at the envelope would leave the multiplier unchanged."""
