"""Input validation helpers.

Small checks shared by the dataclass validators, the scenario loader and
the sklearn-facing estimator. All raise :class:`ufls.errors.ConfigurationError`
so callers can surface one error type for bad inputs.
"""

import numbers

import numpy as np

from .errors import ConfigurationError


def check_positive(value, name):
    """Require a finite value > 0."""
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be a finite positive number, got {value!r}")
    return float(value)


def check_non_negative(value, name):
    """Require a finite value >= 0."""
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value < 0:
        raise ConfigurationError(f"{name} must be a finite non-negative number, got {value!r}")
    return float(value)


def check_in_range(value, name, low, high, inclusive_low=True, inclusive_high=True):
    """Require low (<|<=) value (<|<=) high."""
    ok_low = value >= low if inclusive_low else value > low
    ok_high = value <= high if inclusive_high else value < high
    if not (isinstance(value, numbers.Real) and np.isfinite(value) and ok_low and ok_high):
        lo = "[" if inclusive_low else "("
        hi = "]" if inclusive_high else ")"
        raise ConfigurationError(f"{name} must lie in {lo}{low}, {high}{hi}, got {value!r}")
    return float(value)


def check_int_at_least(value, name, minimum):
    """Require an integer >= minimum."""
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ConfigurationError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def as_measurement_array(X, name="X"):
    """Coerce a measurement series to a finite 1-D float array.

    Accepts array-likes of shape (n,) or (n, 1).
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D (or a single column), got shape {arr.shape}")
    if arr.size == 0:
        raise ConfigurationError(f"{name} must contain at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite values")
    return arr
