"""Exception hierarchy shared across the package."""

from __future__ import annotations


class MagnomechError(Exception):
    """Base class for all package errors."""


class ConfigError(MagnomechError):
    """Malformed or incomplete configuration."""


class ValidationError(ConfigError):
    """One or more parameter invariants are violated.

    Attributes
    ----------
    violations : list of str
        Every violation found, in field order.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericError(MagnomechError):
    """A numerical routine failed (singular system, no convergence, ...)."""


class PreconditionError(NumericError):
    """An operation was called outside its domain (e.g. unstable drift matrix)."""


class SingularityError(NumericError):
    """A denominator vanished along an iteration path."""


class ConvergenceError(NumericError):
    """Fixed-point iteration did not converge.

    Carries the last iterate and its residual for diagnosis.
    """

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class PhysicalityError(NumericError):
    """A covariance matrix violates the uncertainty principle beyond tolerance."""


class MonogamyError(NumericError):
    """A residual contangle is negative beyond numerical tolerance."""
