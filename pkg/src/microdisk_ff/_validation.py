"""Exceptions and small argument checks shared across the package."""
from __future__ import annotations

import math

import numpy as np


class MicrodiskError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(MicrodiskError, ValueError):
    """A parameter is outside its allowed domain."""


class NearFieldFormatError(MicrodiskError, ValueError):
    """A near-field or far-field grid file could not be parsed."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class OutOfDomainError(MicrodiskError, ValueError):
    """A query point lies outside the sampled extent of a field."""


class ZeroPowerError(MicrodiskError, ArithmeticError):
    """A far-field pattern carries no power, so normalized metrics are undefined."""


class GridMismatchError(MicrodiskError, ValueError):
    """Two far-field grids do not share the same sampling."""


class NoBracketError(MicrodiskError, ValueError):
    """A sweep maximum sits on the boundary and cannot be bracketed."""


def check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise InvalidParameterError(f"{name} must be non-negative, got {value!r}")
    return value


def check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_finite_array(name: str, arr, ndim: int | None = None, last: int | None = None) -> np.ndarray:
    """Return ``arr`` as an ndarray after checking shape and finiteness."""
    arr = np.asarray(arr)
    if ndim is not None and arr.ndim != ndim:
        raise InvalidParameterError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if last is not None and arr.shape[-1] != last:
        raise InvalidParameterError(f"{name} must have trailing dimension {last}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    return arr
