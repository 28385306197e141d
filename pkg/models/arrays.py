"""
Helpers for numpy array fields on pydantic models.

Arrays stored on models are converted once, checked and marked read-only.
"""

from typing import Optional

import numpy as np


def frozen_array(
    value,
    *,
    dtype=np.complex128,
    ndim: Optional[int] = None,
    name: str = "array",
) -> np.ndarray:
    """
    Convert a value to a read-only numpy array.

    Args:
        value: Array-like input
        dtype: Target dtype
        ndim: Required number of dimensions (None skips the check)
        name: Field name used in error messages

    Returns:
        Read-only array (a copy when the input was writeable)

    Raises:
        ValueError: On wrong dimensionality or non-finite entries
    """
    arr = np.array(value, dtype=dtype, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def unitary_error(matrix: np.ndarray) -> float:
    """Max-abs deviation of B^H B from the identity."""
    gram = matrix.conj().T @ matrix
    return float(np.max(np.abs(gram - np.eye(matrix.shape[1]))))
