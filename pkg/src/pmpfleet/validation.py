"""Small input-checking helpers used by the public entry points.

Every check raises :class:`~pmpfleet.errors.ValidationError` with a message
that names the offending argument, so callers can surface the message
directly to users.
"""

from __future__ import annotations

from typing import Any, Iterable

import numpy as np

from .errors import ValidationError


def require(condition: Any, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def as_float_array(values: Iterable[float] | np.ndarray, name: str, *, length: int | None = None) -> np.ndarray:
    """Coerce to a 1-D float array and reject NaN/inf entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if length is not None and arr.size != length:
        raise ValidationError(f"{name} must have length {length}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_finite_scalar(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}")
    return value


def check_positive(value: float, name: str) -> float:
    value = check_finite_scalar(value, name)
    if value <= 0.0:
        raise ValidationError(f"{name} must be positive, got {value}")
    return value


def check_nonnegative(value: float, name: str) -> float:
    value = check_finite_scalar(value, name)
    if value < 0.0:
        raise ValidationError(f"{name} must be non-negative, got {value}")
    return value


def check_in_open_interval(value: float, name: str, low: float, high: float) -> float:
    value = check_finite_scalar(value, name)
    if not (low < value < high):
        raise ValidationError(f"{name} must lie in the open interval ({low}, {high}), got {value}")
    return value


def frozen_array(values: Iterable[float] | np.ndarray, name: str, *, length: int | None = None) -> np.ndarray:
    """Like :func:`as_float_array` but returns a read-only copy.

    Used by the frozen dataclasses so that records really are immutable
    after construction (a plain ndarray field would still be writable).
    """
    arr = np.array(as_float_array(values, name, length=length), copy=True)
    arr.setflags(write=False)
    return arr
