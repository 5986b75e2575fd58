"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def as_cloud(Y, name: str = "Y") -> np.ndarray:
    """Coerce to a 2-D float array of shape (n, d) with finite entries."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n, d), got shape {Y.shape}")
    if Y.shape[0] == 0:
        raise ValueError(f"{name} must contain at least one point")
    if not np.all(np.isfinite(Y)):
        raise ValueError(f"{name} contains non-finite entries")
    return Y


def as_distances(dist, name: str = "dist") -> np.ndarray:
    """Validate a symmetric distance matrix with zero diagonal."""
    D = np.asarray(dist, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"{name} must be square, got shape {D.shape}")
    if not np.allclose(D, D.T, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    if np.any(np.diag(D) != 0):
        raise ValueError(f"{name} must have a zero diagonal")
    if np.any(D < 0):
        raise ValueError(f"{name} must be non-negative")
    return D


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_non_negative(value: float, name: str) -> float:
    value = float(value)
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return value


def check_count(value: int, name: str, minimum: int = 1) -> int:
    """Validate an integer count bounded below by ``minimum``."""
    if int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def as_rng(seed) -> np.random.Generator:
    """Accept a Generator, a seed, or None (fresh entropy)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
