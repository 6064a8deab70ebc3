#!/usr/bin/env python3
"""Exception types shared by the heat-kernel modules.

The command line maps every HeatKernelError to exit status 1.
"""


class HeatKernelError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HeatKernelError, ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class EnvelopeError(HeatKernelError, ValueError):
    """Argument lies outside the supported accuracy envelope."""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class ConvergenceError(HeatKernelError, RuntimeError):
    """A refinement loop stopped before meeting its tolerance."""

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class PreconditionError(HeatKernelError, ValueError):
    """An input object violates the preconditions of an operation."""


class FitError(HeatKernelError):
    """A log-log decay fit could not be formed."""


class ConfigurationError(HeatKernelError):
    """An environment setting could not be parsed."""
