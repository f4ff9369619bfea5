from __future__ import annotations

import numpy as np

from .exceptions import DomainError


def as_complex_vector(x, name: str = "input") -> np.ndarray:
    """1-d complex array with finite entries."""
    try:
        arr = np.asarray(x, dtype=complex)
    except (TypeError, ValueError):
        raise DomainError(f"{name} is not numeric") from None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr
