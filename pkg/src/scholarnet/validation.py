"""Input validation helpers used across modules and by the estimator API."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, SchemaError

PROB_SUM_TOL = 1e-9


def as_float_vector(values, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting NaN/inf."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{name} contains non-finite entries")
    return arr


def check_distribution(values, name: str = "distribution", allow_zero: bool = False) -> np.ndarray:
    """Validate a probability vector: non-negative, sums to 1 within tolerance.

    With ``allow_zero`` an all-zero vector passes through (callers flag and
    exclude those rows); anything else that does not sum to 1 is rejected.
    """
    arr = as_float_vector(values, name)
    if arr.size == 0:
        raise DimensionError(f"{name} is empty")
    if np.any(arr < 0):
        raise SchemaError(f"{name} has negative entries")
    total = float(arr.sum())
    if total == 0.0:
        if allow_zero:
            return arr
        raise SchemaError(f"{name} is all-zero")
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise SchemaError(f"{name} sums to {total!r}, expected 1 within {PROB_SUM_TOL}")
    return arr


def is_zero_row(values) -> bool:
    return float(np.asarray(values, dtype=np.float64).sum()) == 0.0


def check_same_length(p: np.ndarray, q: np.ndarray) -> None:
    if p.shape != q.shape:
        raise DimensionError(f"length mismatch: {p.shape[0]} vs {q.shape[0]}")


def check_square_matrix(values, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{name} contains non-finite entries")
    return arr


def check_symmetric(arr: np.ndarray, name: str = "matrix", tol: float = 0.0) -> np.ndarray:
    if tol == 0.0:
        ok = np.array_equal(arr, arr.T)
    else:
        ok = np.allclose(arr, arr.T, atol=tol, rtol=0)
    if not ok:
        raise SchemaError(f"{name} is not symmetric")
    return arr


def require(condition: bool, message: str) -> None:
    """Schema-level assertion with a readable error."""
    if not condition:
        raise SchemaError(message)
