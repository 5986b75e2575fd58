"""Point-cloud sampling, noise models, and serialization.

Samplers produce clouds in R^d whose signal lives on a low-dimensional
set (unit 2-sphere, two interleaved semicircles) with the remaining
coordinates zero-padded.  Noise is bounded: each point moves by a vector
of norm at most sigma, drawn either isotropically in the ambient space
or inside the normal space of the sphere.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .validation import as_cloud, as_rng, check_count, check_non_negative

NOISE_MODES = ("ambient-ball", "normal-space")


@dataclass
class PointCloud:
    """A cloud with optional per-point labels and run metadata."""

    points: np.ndarray
    labels: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def sphere_uniform(n: int, d: int, rng=None) -> np.ndarray:
    """Sample n points uniformly from the unit 2-sphere embedded in R^d.

    The sphere occupies the first three coordinates; coordinates 3..d-1
    are zero.  Uniformity follows from normalizing isotropic Gaussian
    draws.
    """
    n = check_count(n, "n")
    d = check_count(d, "d", minimum=3)
    rng = as_rng(rng)
    g = rng.standard_normal((n, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    points = np.zeros((n, d))
    points[:, :3] = g
    return points


def two_moons(n: int, d: int, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Sample the two-moons set in R^d with labels +1/-1.

    Moon A is the upper unit semicircle centered at (0, 0), moon B the
    lower unit semicircle centered at (1, 0.5); angles are uniform and n
    splits as evenly as possible (A gets the extra point when n is odd).
    Coordinates 2..d-1 are zero.
    """
    n = check_count(n, "n")
    d = check_count(d, "d", minimum=2)
    rng = as_rng(rng)
    na = (n + 1) // 2
    t = rng.random(n)
    points = np.zeros((n, d))
    labels = np.empty(n, dtype=int)
    points[:na, 0] = np.cos(t[:na] * np.pi)
    points[:na, 1] = np.sin(t[:na] * np.pi)
    labels[:na] = 1
    points[na:, 0] = 1 + np.cos(t[na:] * np.pi + np.pi)
    points[na:, 1] = 0.5 + np.sin(t[na:] * np.pi + np.pi)
    labels[na:] = -1
    return points, labels


def add_noise(Y, sigma: float, mode: str = "ambient-ball",
              rng=None) -> np.ndarray:
    """Perturb each point by an independent vector of norm at most sigma.

    ambient-ball draws an isotropic direction in R^d and a radius
    uniform on [0, sigma).  normal-space (sphere clouds only) draws the
    direction inside the normal space of the unit 2-sphere at each
    point, i.e. the span of the radial direction and the zero-padded
    axes, with the same radius law.
    """
    Y = as_cloud(Y)
    sigma = check_non_negative(sigma, "sigma")
    if mode not in NOISE_MODES:
        raise ValueError(f"mode must be one of {NOISE_MODES}, got {mode!r}")
    rng = as_rng(rng)
    n, d = Y.shape
    if sigma == 0:
        return Y.copy()
    if mode == "ambient-ball":
        g = rng.standard_normal((n, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        radii = sigma * rng.random(n)
        return Y + g * radii[:, None]
    # normal-space: rows must lie on the embedded unit sphere
    if d < 3:
        raise ValueError("normal-space mode requires d >= 3")
    radial_ok = np.allclose(np.linalg.norm(Y[:, :3], axis=1), 1.0, atol=1e-8)
    padding_ok = d == 3 or np.allclose(Y[:, 3:], 0.0, atol=1e-8)
    if not (radial_ok and padding_ok):
        raise ValueError(
            "normal-space mode requires points on the embedded unit sphere")
    coeffs = rng.standard_normal((n, d - 2))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    radii = sigma * rng.random(n)
    Z = np.zeros_like(Y)
    Z[:, :3] = coeffs[:, :1] * Y[:, :3]
    if d > 3:
        Z[:, 3:] = coeffs[:, 1:]
    return Y + Z * radii[:, None]


def sphere_geodesic(a, b) -> np.ndarray | float:
    """Geodesic (great-circle) distance between unit-sphere points.

    Accepts single points or row-aligned arrays; only the first three
    coordinates participate.  Values lie in [0, pi].
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scalar = a.ndim == 1 and b.ndim == 1
    a2 = np.atleast_2d(a)[:, :3]
    b2 = np.atleast_2d(b)[:, :3]
    for arr, name in ((a2, "x"), (b2, "y")):
        if not np.allclose(np.linalg.norm(arr, axis=1), 1.0, atol=1e-8):
            raise ValueError(f"not-unit-norm: {name} must lie on the unit "
                             "sphere within 1e-8")
    dots = np.clip(np.sum(a2 * b2, axis=1), -1.0, 1.0)
    angles = np.arccos(dots)
    return float(angles[0]) if scalar else angles


def save_cloud(path, cloud: PointCloud | np.ndarray, labels=None,
               meta: dict | None = None) -> None:
    """Write a cloud as CSV plus a key=value sidecar at path + '.meta'.

    Output is deterministic: full-precision floats, no timestamps, so a
    rerun with identical inputs is bit-identical.
    """
    if isinstance(cloud, PointCloud):
        points = cloud.points
        labels = cloud.labels if labels is None else labels
        meta = dict(cloud.meta) if meta is None else dict(meta)
    else:
        points = as_cloud(cloud)
        meta = {} if meta is None else dict(meta)
    n, d = points.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x{k}" for k in range(d)]
        if labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(n):
            row = [f"{v:.17g}" for v in points[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)
    meta = dict(meta)
    meta.setdefault("n", n)
    meta.setdefault("d", d)
    with open(f"{path}.meta", "w") as fh:
        for key in sorted(meta):
            fh.write(f"{key}={meta[key]}\n")


def load_cloud(path) -> PointCloud:
    """Read a cloud written by save_cloud, including its sidecar."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        has_labels = header and header[-1] == "label"
        ncoord = len(header) - (1 if has_labels else 0)
        points, labels = [], []
        for row in reader:
            points.append([float(v) for v in row[:ncoord]])
            if has_labels:
                labels.append(int(row[ncoord]))
    meta = {}
    try:
        with open(f"{path}.meta") as fh:
            for line in fh:
                line = line.strip()
                if line and "=" in line:
                    key, value = line.split("=", 1)
                    meta[key] = value
    except FileNotFoundError:
        pass
    return PointCloud(points=np.asarray(points, dtype=float),
                      labels=np.asarray(labels, dtype=int) if labels else None,
                      meta=meta)
