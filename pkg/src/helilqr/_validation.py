"""Input validation helpers built on :func:`sklearn.utils.check_array`."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import DimensionError, ValidationError


def as_matrix(m, name="matrix", square=False):
    """Return ``m`` as a finite 2-D float array, raising ValidationError otherwise."""
    try:
        arr = check_array(
            m,
            dtype=np.float64,
            ensure_2d=True,
            ensure_all_finite=True,
            ensure_min_samples=1,
            ensure_min_features=1,
            input_name=name,
        )
    except ValueError as exc:
        raise ValidationError(f"{name}: {exc}") from exc
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_vector(v, size=None, name="vector"):
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise DimensionError(f"{name} must have length {size}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_symmetric(m, name="matrix", atol=1e-10):
    m = as_matrix(m, name, square=True)
    scale = max(1.0, float(np.max(np.abs(m))))
    if not np.allclose(m, m.T, rtol=0.0, atol=atol * scale):
        raise ValidationError(f"{name} must be symmetric")
    return 0.5 * (m + m.T)


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be positive, got {value}")
    return value
