import math

import numpy as np

from .errors import DimensionError, ToolkitError


def as_vector(x, dim=None, name="x"):
    """Coerce ``x`` to a finite 1-D float array, optionally of length ``dim``."""
    if type(x) is np.ndarray and x.dtype == np.float64 and x.ndim == 1:
        v = x
    else:
        v = np.atleast_1d(np.asarray(x, dtype=float))
        if v.ndim != 1:
            raise DimensionError(f"{name} must be one-dimensional, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    # a finite sum implies finite entries; only fall back to the full scan otherwise
    if not math.isfinite(v.sum()) and not np.all(np.isfinite(v)):
        raise ToolkitError(f"{name} contains non-finite entries")
    return v


def as_points(X, dim=None, name="points"):
    P = np.asarray(X, dtype=float)
    if P.ndim == 1:
        P = P[:, None] if dim in (None, 1) else P[None, :]
    if P.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D array of row vectors")
    if dim is not None and P.shape[1] != dim:
        raise DimensionError(f"{name} has dimension {P.shape[1]}, expected {dim}")
    return P
