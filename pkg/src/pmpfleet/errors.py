"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PmpFleetError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PmpFleetError, ValueError):
    """Raised when inputs violate a documented precondition.

    Covers malformed files, inconsistent records, out-of-range parameters,
    and model states that the solver refuses to work with (for example a
    positive shadow value, which means the base-year catch constraint is
    non-binding and cannot anchor a constrained simulation).
    """


class SolverError(PmpFleetError, RuntimeError):
    """Raised when an iterative solve fails to reach its tolerance.

    Carries enough context (bracket, residual, iteration count) in the
    message to diagnose the failure without re-running.
    """
