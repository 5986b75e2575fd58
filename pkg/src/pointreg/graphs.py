"""Similarity graphs and their Laplacians.

Three constructions: the fixed-weight neighborhood graph thresholded at
a connectivity length eps, the fully-connected self-tuning graph with
per-point Gaussian bandwidths, and a K-nearest-neighbor restriction of
an existing graph.  Laplacians always ignore any stored diagonal, so
self-similarities never become self-loops.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .bounds import alpha_m
from .validation import as_distances, check_count, check_positive

LAPLACIAN_KINDS = ("unnormalized", "symmetric-normalized")


@dataclass
class SimilarityGraph:
    """Symmetric non-negative weights plus the recipe that built them.

    weights is a scipy sparse matrix for neighborhood graphs and a dense
    array for the fully-connected self-tuning graph.  params records the
    construction parameters (eps, m, vol, K, tau, ...).
    """

    n: int
    weights: object
    kind: str
    params: dict = field(default_factory=dict)

    def dense(self) -> np.ndarray:
        W = self.weights
        return W.toarray() if sp.issparse(W) else np.asarray(W, dtype=float)

    def degrees(self) -> np.ndarray:
        """Row sums with the diagonal excluded."""
        W = self.dense().copy()
        np.fill_diagonal(W, 0.0)
        return W.sum(axis=1)


def epsilon_graph(dist, eps: float, m: int, vol: float = 1.0) -> SimilarityGraph:
    """Neighborhood graph with the fixed weight
    2 (m+2) vol / (alpha_m eps^(m+2) n) on pairs strictly closer than eps.

    vol rescales the weights by the volume of the underlying manifold
    (1 by default, 4 pi for the unit 2-sphere).
    """
    D = as_distances(dist)
    eps = check_positive(eps, "eps")
    m = check_count(m, "m")
    vol = check_positive(vol, "vol")
    n = D.shape[0]
    w = 2 * (m + 2) * vol / (alpha_m(m) * eps ** (m + 2) * n)
    mask = D < eps
    np.fill_diagonal(mask, False)
    if not mask.any():
        warnings.warn("empty-graph: no pair is closer than eps")
    W = sp.csr_matrix(np.where(mask, w, 0.0))
    return SimilarityGraph(n=n, weights=W, kind="epsilon",
                           params={"eps": eps, "m": m, "vol": vol})


def self_tuning_graph(dist, K: int) -> SimilarityGraph:
    """Fully-connected graph with weights exp(-d^2 / (2 tau_i tau_j)).

    tau_i is the distance from point i to its K-th nearest neighbor,
    excluding the point itself (ties resolve to the smaller index).  A
    zero bandwidth from duplicate points is replaced by the smallest
    positive bandwidth in the cloud, with a warning.
    """
    D = as_distances(dist)
    n = D.shape[0]
    K = check_count(K, "K")
    if K > n - 1:
        raise ValueError(f"K must be <= n-1 = {n - 1}, got {K}")
    masked = D + np.diag(np.full(n, np.inf))
    tau = np.sort(masked, axis=1, kind="stable")[:, K - 1]
    if np.any(tau == 0):
        positive = tau[tau > 0]
        if positive.size == 0:
            raise ValueError("degenerate-scale: all bandwidths are zero")
        warnings.warn("degenerate-scale: zero bandwidth from duplicate "
                      "points, replaced by the smallest positive bandwidth")
        tau = np.where(tau == 0, positive.min(), tau)
    W = np.exp(-(D**2) / (2 * np.outer(tau, tau)))
    return SimilarityGraph(n=n, weights=W, kind="self-tuning",
                           params={"K": K, "tau": tau})


def _knn_sets(dist: np.ndarray, K: int) -> np.ndarray:
    """Boolean matrix: entry (i, j) true when j is among i's K nearest."""
    n = dist.shape[0]
    masked = dist + np.diag(np.full(n, np.inf))
    order = np.argsort(masked, axis=1, kind="stable")[:, :K]
    sets = np.zeros((n, n), dtype=bool)
    sets[np.arange(n)[:, None], order] = True
    return sets


def knn_restrict(g: SimilarityGraph, dist, K: int,
                 rule: str = "union") -> SimilarityGraph:
    """Zero all weights between points that fail the K-NN relation.

    union keeps an edge when either endpoint is among the other's K
    nearest neighbors (symmetric, min degree >= K); mutual requires
    both.  The surviving weights are unchanged.
    """
    if rule not in ("union", "mutual"):
        raise ValueError(f"rule must be union or mutual, got {rule!r}")
    D = as_distances(dist)
    K = check_count(K, "K")
    if D.shape[0] != g.n:
        raise ValueError("dist size does not match the graph")
    sets = _knn_sets(D, K)
    keep = (sets | sets.T) if rule == "union" else (sets & sets.T)
    np.fill_diagonal(keep, False)
    W = np.where(keep, g.dense(), 0.0)
    return SimilarityGraph(n=g.n, weights=sp.csr_matrix(W),
                           kind=f"{g.kind}+knn-{rule}",
                           params={**g.params, "restrict_K": K,
                                   "restrict_rule": rule})


def laplacian(g: SimilarityGraph, kind: str = "unnormalized"):
    """Graph Laplacian of the given kind; the weight diagonal is ignored.

    unnormalized returns D - W; symmetric-normalized returns
    I - D^(-1/2) W D^(-1/2) and requires every degree to be positive.
    Output is sparse when the graph weights are sparse, dense otherwise.
    """
    if kind not in LAPLACIAN_KINDS:
        raise ValueError(f"kind must be one of {LAPLACIAN_KINDS}, got {kind!r}")
    sparse = sp.issparse(g.weights)
    W = g.dense().copy()
    np.fill_diagonal(W, 0.0)
    deg = W.sum(axis=1)
    if kind == "unnormalized":
        L = np.diag(deg) - W
        return sp.csr_matrix(L) if sparse else L
    if np.any(deg <= 0):
        raise ValueError("isolated-node: zero degree under the "
                         "symmetric-normalized Laplacian")
    inv_sqrt = 1.0 / np.sqrt(deg)
    L = np.eye(g.n) - (inv_sqrt[:, None] * W) * inv_sqrt[None, :]
    return sp.csr_matrix(L) if sparse else L


def dirichlet_energy(dist, eps: float, m: int, vol: float, u) -> float:
    """Quadratic neighborhood energy of a node function u.

    Evaluates (m+2) vol / (alpha_m eps^(m+2) n) times the sum over all
    ordered pairs strictly closer than eps of |u(i) - u(j)|^2; equals
    u^T (D - W) u for the matching neighborhood graph.
    """
    D = as_distances(dist)
    eps = check_positive(eps, "eps")
    m = check_count(m, "m")
    vol = check_positive(vol, "vol")
    u = np.asarray(u, dtype=float)
    n = D.shape[0]
    if u.shape != (n,):
        raise ValueError(f"u must have shape ({n},), got {u.shape}")
    mask = D < eps
    np.fill_diagonal(mask, False)
    diffs = (u[:, None] - u[None, :]) ** 2
    total = float(np.sum(diffs[mask]))
    return (m + 2) * vol / (alpha_m(m) * eps ** (m + 2) * n) * total


def export_edges(g: SimilarityGraph, path) -> None:
    """Write the edge list: header 'n m_edges kind', then 'i j w' rows.

    Indices are 0-based, one row per unordered pair i < j with nonzero
    weight, weights at full precision.
    """
    W = g.dense()
    rows, cols = np.nonzero(np.triu(W, k=1))
    with open(path, "w") as fh:
        fh.write(f"{g.n} {len(rows)} {g.kind}\n")
        for i, j in zip(rows, cols):
            fh.write(f"{i} {j} {W[i, j]:.17g}\n")


def load_edges(path) -> SimilarityGraph:
    """Read an edge list written by export_edges.

    Self-tuning graphs are restored with their unit diagonal; other
    kinds come back as sparse symmetric weights.
    """
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) < 3:
            raise ValueError("malformed edge-list header")
        n, m_edges, kind = int(header[0]), int(header[1]), header[2]
        W = np.zeros((n, n))
        count = 0
        for line in fh:
            if not line.strip():
                continue
            i_s, j_s, w_s = line.split()
            i, j, w = int(i_s), int(j_s), float(w_s)
            W[i, j] = W[j, i] = w
            count += 1
    if count != m_edges:
        raise ValueError(f"edge count mismatch: header says {m_edges}, "
                         f"found {count}")
    if kind == "self-tuning":
        np.fill_diagonal(W, 1.0)
        return SimilarityGraph(n=n, weights=W, kind=kind)
    return SimilarityGraph(n=n, weights=sp.csr_matrix(W), kind=kind)
