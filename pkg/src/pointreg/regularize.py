"""Local averaging regularizers for noisy point clouds.

Each regularizer replaces every point by a convex combination of cloud
points near it: all points within a radius (ball average), the point
plus its k nearest neighbors (k-NN average), or a similarity-weighted
average of the whole cloud (self-tuning average).  Outputs therefore
stay inside the convex hull of the input.

Plain functions operate on (n, d) arrays.  The *Average classes wrap
them in the fit/transform estimator idiom so they compose in pipelines;
fitting stores the averaging pool, transforming averages the argument
rows against that pool.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform
from sklearn.base import BaseEstimator, TransformerMixin

from .validation import as_cloud, check_count, check_positive


def ball_average(Y, r: float) -> np.ndarray:
    """Replace each point by the mean of all points strictly within r.

    The point itself is always included (distance 0 < r), so every ball
    is non-empty and the output is well defined for any r > 0.
    """
    Y = as_cloud(Y)
    r = check_positive(r, "r")
    D = squareform(pdist(Y))
    inside = D < r
    return (inside @ Y) / inside.sum(axis=1)[:, None]


def knn_average(Y, k: int) -> np.ndarray:
    """Replace each point by the mean of itself and its k nearest others.

    Neighbor ties at equal distance resolve to the smaller index.
    """
    Y = as_cloud(Y)
    n = Y.shape[0]
    k = check_count(k, "k")
    if k > n - 1:
        raise ValueError(f"k must be <= n-1 = {n - 1}, got {k}")
    D = squareform(pdist(Y))
    np.fill_diagonal(D, np.inf)
    # stable argsort on distances realizes the smaller-index tie rule
    order = np.argsort(D, axis=1, kind="stable")[:, :k]
    out = Y.copy()
    for i in range(n):
        out[i] += Y[order[i]].sum(axis=0)
    return out / (k + 1)


def self_tuning_average(Y, W) -> np.ndarray:
    """Row-normalized weighted average of the whole cloud.

    W is a similarity matrix on Y (typically the self-tuning graph,
    diagonal included); each output row is sum_j W(i,j) y_j divided by
    the row sum, so constant weights reproduce the global mean.
    """
    Y = as_cloud(Y)
    W = getattr(W, "weights", W)
    if hasattr(W, "toarray"):
        W = W.toarray()
    W = np.asarray(W, dtype=float)
    if W.shape != (Y.shape[0], Y.shape[0]):
        raise ValueError(
            f"W must be n x n with n = {Y.shape[0]}, got {W.shape}")
    sums = W.sum(axis=1)
    if np.any(sums <= 0):
        raise ValueError("zero-row-sum: every row of W must sum to > 0")
    return (W @ Y) / sums[:, None]


class BallAverage(BaseEstimator, TransformerMixin):
    """Ball-average regularizer with radius r.

    fit stores the averaging pool; transform maps each row to the mean
    of pool points strictly within r of it.  Transforming the fitted
    data reproduces ball_average exactly.
    """

    def __init__(self, r: float = 1.0):
        self.r = r

    def fit(self, X, y=None):
        check_positive(self.r, "r")
        self.pool_ = as_cloud(X)
        return self

    def transform(self, X) -> np.ndarray:
        X = as_cloud(X)
        D = cdist(X, self.pool_)
        inside = D < self.r
        counts = inside.sum(axis=1)
        if np.any(counts == 0):
            raise ValueError(
                "empty ball: some rows have no pool point within r")
        return (inside @ self.pool_) / counts[:, None]


class KNNAverage(BaseEstimator, TransformerMixin):
    """k-NN average regularizer: mean of the k+1 nearest pool points.

    On the fitted data the nearest pool point of a row is itself, so
    this reproduces knn_average (self plus k nearest others).
    """

    def __init__(self, k: int = 1):
        self.k = k

    def fit(self, X, y=None):
        self.pool_ = as_cloud(X)
        check_count(self.k, "k")
        if self.k > self.pool_.shape[0] - 1:
            raise ValueError("k must be <= pool size - 1")
        return self

    def transform(self, X) -> np.ndarray:
        X = as_cloud(X)
        D = cdist(X, self.pool_)
        order = np.argsort(D, axis=1, kind="stable")[:, :self.k + 1]
        out = np.empty_like(X)
        for i in range(X.shape[0]):
            out[i] = self.pool_[order[i]].mean(axis=0)
        return out


class SelfTuningAverage(BaseEstimator, TransformerMixin):
    """Self-tuning weighted average with per-point bandwidths.

    Bandwidth tau of a row is its distance to the K-th nearest pool
    point, not counting a single exact self-match; weights are
    exp(-d^2 / (2 tau_row tau_pool)).  Transforming the fitted data
    reproduces self_tuning_average over the self-tuning graph.
    """

    def __init__(self, K: int = 7):
        self.K = K

    def fit(self, X, y=None):
        from .graphs import self_tuning_graph

        self.pool_ = as_cloud(X)
        check_count(self.K, "K")
        if self.K > self.pool_.shape[0] - 1:
            raise ValueError("K must be <= pool size - 1")
        D = squareform(pdist(self.pool_))
        self.pool_tau_ = self_tuning_graph(D, self.K).params["tau"]
        return self

    def transform(self, X) -> np.ndarray:
        X = as_cloud(X)
        D = cdist(X, self.pool_)
        tau = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            row = np.sort(D[i], kind="stable")
            if row[0] == 0.0:
                row = row[1:]
            tau[i] = row[self.K - 1]
        positive = self.pool_tau_[self.pool_tau_ > 0]
        tau[tau == 0] = positive.min() if positive.size else 1.0
        W = np.exp(-(D**2) / (2 * np.outer(tau, self.pool_tau_)))
        return (W @ self.pool_) / W.sum(axis=1)[:, None]
