"""Graph-based probit semi-supervised classification.

The classifier is the sign of the minimizer of

    J(u) = (1/2c) <u, L u> - sum_j log Phi(y(j) u(j); gamma)

where L is the symmetric-normalized Laplacian of a similarity graph,
Phi is the normal CDF with scale gamma, the sum runs over labeled
points, and c = n (sum_{i>=2} lambda_i^-1)^-1 balances the quadratic
term.  Minimization runs over the span of the non-trivial eigenvectors,
which makes the objective strictly convex.

Eigenvalues below floating-point resolution get a dedicated treatment:
as they tend to zero the quadratic term freezes every resolvable
direction and leaves the sub-resolution cluster (minus the exact
trivial direction) with coefficient k/n each.  Optimizing that limit
directly avoids an ill-conditioned c without changing the answer on
well-conditioned graphs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist, pdist, squareform
from scipy.special import log_ndtr
from sklearn.base import BaseEstimator, ClassifierMixin

from .graphs import SimilarityGraph, knn_restrict, self_tuning_graph
from .validation import as_cloud, as_rng, check_count, check_positive

MAX_DENSE_N = 2000
NULL_RTOL = 1e-12


def log_normal_cdf(t, gamma: float):
    """log Phi(t; gamma) for the normal CDF with standard deviation gamma.

    Evaluated through the scaled complementary error function, so the
    result is finite and strictly increasing for arbitrarily negative t.
    """
    check_positive(gamma, "gamma")
    return log_ndtr(np.asarray(t, dtype=float) / gamma)


def _psi(t: np.ndarray) -> np.ndarray:
    """Density-to-CDF ratio phi(t)/Phi(t), computed in log space."""
    return np.exp(-0.5 * t * t - 0.5 * np.log(2 * np.pi) - log_ndtr(t))


class ProbitProblem:
    """A probit objective bound to one graph and one label set.

    Holds the eigendecomposition of the symmetric-normalized Laplacian,
    the feasible span (all non-trivial eigendirections), the quadratic
    coefficients, and the labels.  with_labels produces a sibling
    problem sharing the eigensystem, which makes cross-validation folds
    cheap.
    """

    def __init__(self, W, labeled_idx, labeled_val, gamma: float = 0.1):
        if isinstance(W, SimilarityGraph):
            W = W.dense()
        elif sp.issparse(W):
            W = W.toarray()
        W = np.asarray(W, dtype=float)
        n = W.shape[0]
        if W.shape != (n, n):
            raise ValueError("W must be square")
        if n > MAX_DENSE_N:
            raise ValueError(
                f"probit classification supports n <= {MAX_DENSE_N}")
        W = W.copy()
        np.fill_diagonal(W, 0.0)
        ncomp, _ = connected_components(sp.csr_matrix(W > 0), directed=False)
        if ncomp > 1:
            raise ValueError(
                f"disconnected-graph: {ncomp} components; the classifier "
                "needs a connected graph")
        deg = W.sum(axis=1)
        inv_sqrt = 1.0 / np.sqrt(deg)
        self.L = np.eye(n) - (inv_sqrt[:, None] * W) * inv_sqrt[None, :]
        lam, Q = np.linalg.eigh(self.L)
        lam = np.clip(lam, 0.0, None)
        self.n = n
        self.eigenvalues = lam
        floor = NULL_RTOL * lam[-1] if lam[-1] > 0 else 0.0
        null = lam <= floor
        k_total = int(null.sum())
        if k_total >= 2:
            # sub-resolution cluster: remove the exact trivial direction
            # D^(1/2) 1 analytically, keep the k remaining directions
            # with the limiting coefficient k/n each
            v0 = np.sqrt(deg)
            v0 /= np.linalg.norm(v0)
            C = Q[:, null]
            H = sla.null_space((C.T @ v0)[None, :])
            self.basis = C @ H
            k = k_total - 1
            self.coefficients = np.full(k, k / n)
            self.c = None
        else:
            lam2 = lam[1:]
            self.basis = Q[:, 1:]
            self.c = n / float(np.sum(1.0 / lam2))
            self.coefficients = lam2 / self.c
        self._set_labels(labeled_idx, labeled_val)
        self.gamma = check_positive(gamma, "gamma")

    def _set_labels(self, labeled_idx, labeled_val):
        idx = np.asarray(labeled_idx, dtype=int)
        val = np.asarray(labeled_val, dtype=float)
        if idx.ndim != 1 or idx.shape != val.shape:
            raise ValueError("labeled_idx and labeled_val must be aligned "
                             "1-D arrays")
        if len(np.unique(idx)) != len(idx):
            raise ValueError("labeled indices must be distinct")
        if np.any((idx < 0) | (idx >= self.n)):
            raise ValueError("labeled index out of range")
        if not np.all(np.isin(val, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")
        self.labeled_idx = idx
        self.labeled_val = val
        self.label_rows = self.basis[idx, :]

    def with_labels(self, labeled_idx, labeled_val) -> "ProbitProblem":
        """Same graph and eigensystem, different label set."""
        clone = object.__new__(ProbitProblem)
        clone.__dict__.update(self.__dict__)
        clone._set_labels(labeled_idx, labeled_val)
        return clone

    # objective and derivatives in feasible-span coordinates

    def objective_coeffs(self, a: np.ndarray) -> float:
        u_l = self.label_rows @ a
        t = self.labeled_val * u_l / self.gamma
        return float(0.5 * np.sum(self.coefficients * a * a)
                     - np.sum(log_ndtr(t)))

    def gradient_coeffs(self, a: np.ndarray) -> np.ndarray:
        u_l = self.label_rows @ a
        t = self.labeled_val * u_l / self.gamma
        s = self.labeled_val * _psi(t) / self.gamma
        return self.coefficients * a - self.label_rows.T @ s


def probit_objective(problem: ProbitProblem, u) -> float:
    """Evaluate J(u) for a vector in the feasible span."""
    u = np.asarray(u, dtype=float)
    if u.shape != (problem.n,):
        raise ValueError(f"u must have shape ({problem.n},)")
    a = problem.basis.T @ u
    residual = u - problem.basis @ a
    if np.linalg.norm(residual) > 1e-8 * (1 + np.linalg.norm(u)):
        raise ValueError("u lies outside the feasible span of non-trivial "
                         "eigendirections")
    if problem.c is not None:
        quad = 0.5 / problem.c * float(u @ (problem.L @ u))
    else:
        quad = 0.5 * float(np.sum(problem.coefficients * a * a))
    t = problem.labeled_val * u[problem.labeled_idx] / problem.gamma
    return quad - float(np.sum(log_ndtr(t)))


@dataclass
class ClassifierResult:
    """Minimizer, sign predictions, and optimizer diagnostics."""

    u: np.ndarray
    predictions: np.ndarray
    grad_norm: float
    iterations: int
    converged: bool


def fit_probit(problem: ProbitProblem, tol: float = 1e-8,
               max_iter: int = 500) -> ClassifierResult:
    """Minimize the probit objective by damped Newton iteration.

    Each step solves the Newton system through the Woodbury identity
    (the Hessian is diagonal plus a rank-J label term), halving the
    step until the objective decreases.  Terminates when the gradient
    norm falls below tol or after max_iter iterations; a final gradient
    above 1e-4 raises, since the strictly convex objective should be
    easy to minimize.
    """
    p = problem
    a = np.zeros(p.basis.shape[1])
    dcoef = p.coefficients
    grad_norm = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        u_l = p.label_rows @ a
        t = p.labeled_val * u_l / p.gamma
        psi = _psi(t)
        s = p.labeled_val * psi / p.gamma
        grad = dcoef * a - p.label_rows.T @ s
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol:
            break
        h = (psi * psi + t * psi) / p.gamma**2
        inv_d = 1.0 / dcoef
        scaled = inv_d * grad
        M = np.diag(1.0 / h) + p.label_rows @ (inv_d[:, None]
                                               * p.label_rows.T)
        step = scaled - inv_d * (p.label_rows.T
                                 @ np.linalg.solve(M, p.label_rows @ scaled))
        f0 = p.objective_coeffs(a)
        alpha = 1.0
        candidate = a - step
        for _ in range(60):
            candidate = a - alpha * step
            if p.objective_coeffs(candidate) < f0:
                break
            alpha *= 0.5
        a = candidate
    converged = grad_norm <= tol
    if not converged:
        if grad_norm > 1e-4:
            raise RuntimeError(
                f"no-convergence: gradient norm {grad_norm:.3e} after "
                f"{max_iter} iterations")
        warnings.warn(f"probit optimizer stopped at gradient norm "
                      f"{grad_norm:.3e}")
    u = p.basis @ a
    predictions = np.where(u >= 0, 1, -1)
    return ClassifierResult(u=u, predictions=predictions,
                            grad_norm=grad_norm, iterations=iterations,
                            converged=converged)


def count_unlabeled_errors(predictions, truth, labeled_idx) -> int:
    """Sign mismatches against ground truth, excluding labeled points."""
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    mask = np.ones(len(truth), dtype=bool)
    mask[np.asarray(labeled_idx, dtype=int)] = False
    return int(np.sum(predictions[mask] != truth[mask]))


@dataclass
class CVResult:
    """Chosen grid entry plus the full cross-validation table."""

    best_index: int
    best_param: float
    table: list


def _grid_param(entry) -> float:
    for name in ("r", "k", "K"):
        if hasattr(entry, name):
            return float(getattr(entry, name))
    raise ValueError("grid entries must expose a parameter r, k, or K")


def _stratified_folds(labeled_val: np.ndarray, rng) -> np.ndarray:
    """Assign each labeled point to one of two folds, per class."""
    assignment = np.empty(len(labeled_val), dtype=int)
    for cls in (1.0, -1.0):
        pos = np.flatnonzero(labeled_val == cls)
        if len(pos) < 2:
            raise ValueError(
                "insufficient-labels: need >= 2 labeled points per class")
        perm = rng.permutation(pos)
        half = (len(perm) + 1) // 2
        assignment[perm[:half]] = 0
        assignment[perm[half:]] = 1
    return assignment


def cross_validate(Y, labeled_idx, labeled_val, grid, graph_K: int,
                   folds: int = 2, repeats: int = 5, rng=None,
                   gamma: float = 0.1, restrict: str | None = None,
                   restrict_K: int | None = None) -> CVResult:
    """Select a regularizer by two-fold cross-validation on the labels.

    For each grid entry the cloud is regularized once and its graph and
    spectrum are reused across folds and repeats.  Each repeat splits
    the labeled set in half per class; each half trains a classifier
    scored on the other half.  The entry with the smallest mean
    held-out error wins; ties go to the smaller parameter.
    """
    if folds != 2:
        raise ValueError("only 2-fold cross-validation is supported")
    Y = as_cloud(Y)
    labeled_idx = np.asarray(labeled_idx, dtype=int)
    labeled_val = np.asarray(labeled_val, dtype=float)
    check_count(repeats, "repeats")
    rng = as_rng(rng)
    if len(grid) == 0:
        raise ValueError("grid must be non-empty")
    for cls in (1.0, -1.0):
        if np.sum(labeled_val == cls) < 2:
            raise ValueError(
                "insufficient-labels: need >= 2 labeled points per class")

    table = []
    for entry in grid:
        Ybar = entry.fit(Y).transform(Y)
        D = squareform(pdist(Ybar))
        graph = self_tuning_graph(D, graph_K)
        if restrict is not None:
            graph = knn_restrict(graph, D,
                                 restrict_K or graph_K, rule=restrict)
        base = ProbitProblem(graph, labeled_idx[:2],
                             np.array([1.0, -1.0]), gamma=gamma)
        errors = []
        for _ in range(repeats):
            assignment = _stratified_folds(labeled_val, rng)
            for train_fold in (0, 1):
                train = assignment == train_fold
                problem = base.with_labels(labeled_idx[train],
                                           labeled_val[train])
                result = fit_probit(problem)
                held = ~train
                held_pred = result.predictions[labeled_idx[held]]
                errors.append(int(np.sum(held_pred != labeled_val[held])))
        table.append({"param": _grid_param(entry),
                      "mean_error": float(np.mean(errors))})
    best_index = min(range(len(table)),
                     key=lambda i: (table[i]["mean_error"],
                                    table[i]["param"]))
    return CVResult(best_index=best_index,
                    best_param=table[best_index]["param"], table=table)


class ProbitClassifier(BaseEstimator, ClassifierMixin):
    """Semi-supervised classifier over a self-tuning similarity graph.

    fit takes the full cloud X and labels y in {-1, 0, +1} with 0
    marking unlabeled points; the transductive labeling of every point
    is exposed as transduction_.  predict returns the transduction for
    the training cloud and nearest-training-neighbor labels for new
    points.
    """

    def __init__(self, K: int = 10, gamma: float = 0.1,
                 restrict: str | None = None,
                 restrict_K: int | None = None):
        self.K = K
        self.gamma = gamma
        self.restrict = restrict
        self.restrict_K = restrict_K

    def fit(self, X, y):
        X = as_cloud(X)
        y = np.asarray(y)
        if y.shape != (X.shape[0],):
            raise ValueError("y must have one entry per row of X")
        labeled_idx = np.flatnonzero(y != 0)
        if labeled_idx.size == 0:
            raise ValueError("insufficient-labels: all points unlabeled")
        D = squareform(pdist(X))
        graph = self_tuning_graph(D, self.K)
        if self.restrict is not None:
            graph = knn_restrict(graph, D, self.restrict_K or self.K,
                                 rule=self.restrict)
        problem = ProbitProblem(graph, labeled_idx,
                                y[labeled_idx].astype(float),
                                gamma=self.gamma)
        result = fit_probit(problem)
        self.X_ = X
        self.u_ = result.u
        self.transduction_ = result.predictions
        self.n_iter_ = result.iterations
        self.classes_ = np.array([-1, 1])
        return self

    def predict(self, X) -> np.ndarray:
        X = as_cloud(X)
        if X.shape == self.X_.shape and np.array_equal(X, self.X_):
            return self.transduction_.copy()
        nearest = np.argmin(cdist(X, self.X_), axis=1)
        return self.transduction_[nearest]
