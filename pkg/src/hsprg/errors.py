"""Exception hierarchy shared across the package."""

from __future__ import annotations


class HsprgError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HsprgError, ValueError):
    """An argument violates an operation's contract."""


class InvalidConfigError(HsprgError, ValueError):
    """A configuration violates a stated constraint; message names it."""


class ResourceLimitError(HsprgError, RuntimeError):
    """An exhaustive computation would exceed its guard."""


class NumericalFailureError(HsprgError, RuntimeError):
    """An iterative solver failed to converge.

    ``last_references`` carries the final reference set for diagnosis.
    """

    def __init__(self, message, last_references=None):
        super().__init__(message)
        self.last_references = tuple(last_references or ())


class CertificateFailedError(HsprgError, RuntimeError):
    """A measured error certificate exceeded its target bound."""


class PreconditionError(HsprgError, ValueError):
    """A documented precondition does not hold for the given inputs."""
