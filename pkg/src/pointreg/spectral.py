"""Smallest eigenpairs, the analytic sphere spectrum, and spectral metrics.

Eigenvalues carry two conventions.  The matrix convention is the plain
eigenvalue of the assembled Laplacian.  The quotient convention divides
the neighborhood energy by the 1/n-weighted vector norm and therefore
equals n times the matrix value; spectra exports carry both columns.
Comparisons against continuum references use the matrix convention.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .graphs import epsilon_graph, laplacian
from .validation import as_distances, check_count, check_positive

DENSE_CUTOFF = 2000


@dataclass
class Spectrum:
    """Ascending eigenvalues (matrix convention) with optional vectors."""

    values: np.ndarray
    vectors: np.ndarray | None
    n: int

    @property
    def quotient_values(self) -> np.ndarray:
        """Eigenvalues in the energy-quotient convention: n times matrix."""
        return self.n * self.values


def smallest_eigs(L, k: int, tol: float = 1e-9) -> Spectrum:
    """The k algebraically smallest eigenpairs of a symmetric PSD operator.

    Dense symmetric eigendecomposition up to n = 2000; shift-invert
    Lanczos iteration above.  Residuals ||L v - lambda v|| are checked
    against tol (relative to the operator scale) for every pair.
    """
    n = L.shape[0]
    k = check_count(k, "k")
    if k > n:
        raise ValueError(f"k must be <= n = {n}, got {k}")
    check_positive(tol, "tol")
    if n <= DENSE_CUTOFF or k >= n - 1:
        dense = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
        values, vectors = np.linalg.eigh(dense)
        values, vectors = values[:k], vectors[:, :k]
    else:
        # shift just below zero keeps the factorization nonsingular on
        # the singular Laplacian while targeting the smallest eigenvalues
        try:
            values, vectors = eigsh(sp.csr_matrix(L), k=k, sigma=-1e-3,
                                    which="LM", maxiter=50 * k)
        except ArpackNoConvergence as exc:
            raise RuntimeError(
                f"no-convergence: eigensolver gave up ({exc})") from exc
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    residual = _max_residual(L, values, vectors)
    if residual > max(tol, 1e-12) * scale:
        raise RuntimeError(
            f"no-convergence: residual {residual:.3e} exceeds tolerance")
    return Spectrum(values=values, vectors=vectors, n=n)


def _max_residual(L, values, vectors) -> float:
    R = L @ vectors - vectors * values[None, :]
    return float(np.linalg.norm(R, axis=0).max(initial=0.0))


def sphere_spectrum(count: int) -> np.ndarray:
    """First eigenvalues of the unit-sphere Laplacian: l(l+1), each
    repeated 2l+1 times, ascending."""
    count = check_count(count, "count")
    values = []
    level = 0
    while len(values) < count:
        values.extend([level * (level + 1)] * (2 * level + 1))
        level += 1
    return np.asarray(values[:count], dtype=float)


def spectral_error(computed, reference) -> np.ndarray:
    """Per-index relative errors |computed - reference| / reference.

    The first index, whose reference is the zero eigenvalue, is
    reported as an absolute error.
    """
    computed = np.asarray(
        computed.values if isinstance(computed, Spectrum) else computed,
        dtype=float)
    reference = np.asarray(reference, dtype=float)
    if computed.shape != reference.shape:
        raise ValueError(
            f"length-mismatch: {computed.shape} vs {reference.shape}")
    errors = np.empty_like(computed)
    errors[0] = abs(computed[0] - reference[0])
    if len(computed) > 1:
        if np.any(reference[1:] <= 0):
            raise ValueError("reference values beyond the first index "
                             "must be positive")
        errors[1:] = np.abs(computed[1:] - reference[1:]) / reference[1:]
    return errors


@dataclass
class SandwichReport:
    """Result of the eigenvalue bracketing check."""

    eta: float
    lower: np.ndarray
    middle: np.ndarray
    upper: np.ndarray
    passed: np.ndarray

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))


def measure_eta(distX, distYbar, eps: float) -> float:
    """Largest |delta_X - delta_Ybar| over pairs near the threshold.

    Two passes: a global maximum first, then a maximum restricted to
    pairs whose smaller distance is below eps plus that global maximum.
    The restricted value is what the bracketing factors need.
    """
    DX = as_distances(distX)
    DY = as_distances(distYbar)
    if DX.shape != DY.shape:
        raise ValueError("shape-mismatch between the two distance matrices")
    diff = np.abs(DX - DY)
    eta_global = float(diff.max(initial=0.0))
    near = np.minimum(DX, DY) < eps + eta_global
    np.fill_diagonal(near, False)
    if not near.any():
        return 0.0
    return float(diff[near].max())


def sandwich_check(distX, distYbar, eps: float, m: int,
                   k: int = 10) -> SandwichReport:
    """Verify the eigenvalue bracketing between clean and regularized graphs.

    For l = 1..k, the l-th eigenvalue of the graph on the regularized
    distances at eps must lie between the eigenvalues of the clean-
    distance graphs at eps -/+ eta, scaled by ((eps -/+ eta)/eps)^(m+2),
    where eta is the measured distance discrepancy.
    """
    DX = as_distances(distX)
    DY = as_distances(distYbar)
    eps = check_positive(eps, "eps")
    k = check_count(k, "k")
    eta = measure_eta(DX, DY, eps)
    if eps <= eta:
        raise ValueError(
            f"eta-too-large: measured eta {eta:.6g} >= eps {eps:.6g}")

    def eigs(dist, e):
        g = epsilon_graph(dist, e, m)
        L = laplacian(g, "unnormalized")
        return smallest_eigs(L, k).values

    lo = ((eps - eta) / eps) ** (m + 2) * eigs(DX, eps - eta)
    hi = ((eps + eta) / eps) ** (m + 2) * eigs(DX, eps + eta)
    mid = eigs(DY, eps)
    slack = 1e-8 * np.maximum(1.0, np.abs(mid))
    passed = (lo <= mid + slack) & (mid <= hi + slack)
    return SandwichReport(eta=eta, lower=lo, middle=mid, upper=hi,
                          passed=passed)


def export_spectrum_csv(path, spectrum: Spectrum,
                        reference=None) -> None:
    """Write a spectrum as CSV with both conventions and reference errors.

    Columns: index (1-based), value_paper_convention (quotient),
    value_matrix_convention, reference, relative_error.  Reference and
    error cells are empty when no reference is given; the first index
    reports an absolute error.
    """
    values = spectrum.values
    quotient = spectrum.quotient_values
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        errors = spectral_error(values, reference)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "value_paper_convention",
                         "value_matrix_convention", "reference",
                         "relative_error"])
        for i, value in enumerate(values):
            row = [i + 1, f"{quotient[i]:.17g}", f"{value:.17g}"]
            if reference is None:
                row += ["", ""]
            else:
                row += [f"{reference[i]:.17g}", f"{errors[i]:.17g}"]
            writer.writerow(row)


def load_spectrum_csv(path) -> dict:
    """Read a spectra CSV back into column arrays."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    out = {
        "index": np.array([int(r["index"]) for r in rows]),
        "value_paper_convention": np.array(
            [float(r["value_paper_convention"]) for r in rows]),
        "value_matrix_convention": np.array(
            [float(r["value_matrix_convention"]) for r in rows]),
    }
    if rows and rows[0].get("reference"):
        out["reference"] = np.array([float(r["reference"]) for r in rows])
        out["relative_error"] = np.array(
            [float(r["relative_error"]) for r in rows])
    return out
