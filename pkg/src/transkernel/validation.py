"""Input validation helpers used across the package."""

import numpy as np

from .errors import ValidationError


def as_float_matrix(values, name="matrix"):
    """Coerce to a 2-D float64 array, raising ValidationError otherwise."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    return arr


def check_square(arr, name="matrix"):
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_finite(arr, name="matrix"):
    if arr.size and not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_symmetric(arr, name="matrix", rtol=1e-12):
    """Check symmetry up to ``rtol`` relative to the largest magnitude entry."""
    if arr.size == 0:
        return arr
    scale = max(float(np.abs(arr).max()), 1.0)
    asym = float(np.abs(arr - arr.T).max())
    if asym > rtol * scale:
        raise ValidationError(
            f"{name} is not symmetric: max |A - A.T| = {asym:g} "
            f"exceeds {rtol:g} relative tolerance"
        )
    return arr


def check_lengths_match(a, b, name_a="first", name_b="second"):
    if len(a) != len(b):
        raise ValidationError(
            f"length mismatch: {name_a} has {len(a)} entries, {name_b} has {len(b)}"
        )
