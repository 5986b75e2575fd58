import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.spatial.distance import pdist, squareform

from pointreg.graphs import (SimilarityGraph, dirichlet_energy, epsilon_graph,
                             export_edges, knn_restrict, laplacian,
                             load_edges, self_tuning_graph)


def line_distances(values):
    pts = np.asarray(values, dtype=float)[:, None]
    return squareform(pdist(pts))


def test_epsilon_weight_surface_case():
    # m=2, vol=1, eps=0.5, n=1000: weight 2*4/(pi * 0.5^4 * 1000)
    D = np.zeros((1000, 1000))
    rng = np.random.default_rng(0)
    pts = rng.random((1000, 2)) * 0.01
    D = squareform(pdist(pts))
    g = epsilon_graph(D, 0.5, 2)
    expected = 8.0 / (math.pi * 0.0625 * 1000)
    off = g.dense()[0, 1]
    assert off == pytest.approx(expected, rel=1e-12)


def test_epsilon_weight_curve_case():
    # m=1: alpha_1 = 2, so the two-point weight is 2*3/(2*1*2) = 1.5
    g = epsilon_graph(line_distances([0.0, 0.5]), 1.0, 1)
    assert g.dense()[0, 1] == pytest.approx(1.5, rel=1e-12)


def test_epsilon_graph_strict_threshold():
    g = epsilon_graph(line_distances([0.0, 1.0, 1.9]), 1.0, 1)
    W = g.dense()
    assert W[0, 1] == 0.0          # distance exactly eps is excluded
    assert W[1, 2] > 0.0
    assert np.all(np.diag(W) == 0.0)


def test_epsilon_graph_empty_warns():
    with pytest.warns(UserWarning, match="empty-graph"):
        epsilon_graph(line_distances([0.0, 5.0]), 1.0, 1)


def test_epsilon_graph_symmetric_sparse():
    rng = np.random.default_rng(1)
    D = squareform(pdist(rng.random((40, 3))))
    g = epsilon_graph(D, 0.5, 2)
    assert sp.issparse(g.weights)
    W = g.dense()
    assert np.array_equal(W, W.T)


def test_self_tuning_bandwidths_and_weight():
    g = self_tuning_graph(line_distances([0.0, 1.0, 3.0]), 1)
    assert np.allclose(g.params["tau"], [1.0, 1.0, 2.0])
    W = g.dense()
    # d(1st, 3rd) = 3, tau product 2: exp(-9/4)
    assert W[0, 2] == pytest.approx(math.exp(-2.25), rel=1e-12)
    assert np.allclose(np.diag(W), 1.0)
    assert np.array_equal(W, W.T)


def test_self_tuning_tie_uses_smaller_index():
    # point 0 is equidistant from 1 and 2; tau comes from the sorted row
    g = self_tuning_graph(line_distances([0.0, 1.0, -1.0]), 1)
    assert g.params["tau"][0] == 1.0


def test_self_tuning_duplicate_bandwidth_replaced():
    D = line_distances([0.0, 0.0, 4.0])
    with pytest.warns(UserWarning, match="degenerate-scale"):
        g = self_tuning_graph(D, 1)
    assert np.all(g.params["tau"] > 0)
    assert g.dense()[0, 1] == 1.0  # duplicates stay fully similar


def test_self_tuning_all_duplicates_rejected():
    with pytest.raises(ValueError, match="degenerate-scale"):
        self_tuning_graph(np.zeros((3, 3)), 1)


def test_self_tuning_scale_invariance():
    rng = np.random.default_rng(2)
    D = squareform(pdist(rng.random((20, 3))))
    W1 = self_tuning_graph(D, 4).dense()
    W2 = self_tuning_graph(7.5 * D, 4).dense()
    assert np.allclose(W1, W2, atol=1e-12)


def test_self_tuning_K_too_large():
    with pytest.raises(ValueError):
        self_tuning_graph(line_distances([0.0, 1.0]), 2)


def test_knn_restrict_full_K_changes_nothing():
    D = line_distances([0.0, 1.0, 3.0, 7.0])
    g = self_tuning_graph(D, 2)
    restricted = knn_restrict(g, D, 3)
    W = restricted.dense().copy()
    expected = g.dense().copy()
    np.fill_diagonal(W, 0.0)
    np.fill_diagonal(expected, 0.0)
    assert np.allclose(W, expected)


def test_knn_restrict_union_vs_mutual():
    D = line_distances([0.0, 1.0, 3.0])
    g = SimilarityGraph(n=3, weights=np.ones((3, 3)), kind="test")
    union = knn_restrict(g, D, 1, rule="union").dense()
    assert union[0, 1] == 1.0 and union[1, 2] == 1.0
    assert union[0, 2] == 0.0
    mutual = knn_restrict(g, D, 1, rule="mutual").dense()
    assert mutual[0, 1] == 1.0
    assert mutual[1, 2] == 0.0 and mutual[0, 2] == 0.0


def test_knn_restrict_bad_rule():
    D = line_distances([0.0, 1.0])
    g = self_tuning_graph(D, 1)
    with pytest.raises(ValueError, match="union or mutual"):
        knn_restrict(g, D, 1, rule="either")


def test_laplacian_two_node_eigenvalues():
    w = 0.7
    g = SimilarityGraph(n=2, weights=np.array([[0.0, w], [w, 0.0]]),
                        kind="test")
    L = laplacian(g)
    assert np.allclose(np.linalg.eigvalsh(L), [0.0, 2 * w])


def test_laplacian_kills_constants():
    rng = np.random.default_rng(3)
    D = squareform(pdist(rng.random((25, 3))))
    for kind in ("unnormalized",):
        L = laplacian(self_tuning_graph(D, 4), kind)
        assert np.max(np.abs(L @ np.ones(25))) < 1e-10


def test_normalized_laplacian_spectrum_in_unit_band():
    rng = np.random.default_rng(4)
    D = squareform(pdist(rng.random((30, 3))))
    L = laplacian(self_tuning_graph(D, 5), "symmetric-normalized")
    vals = np.linalg.eigvalsh(L)
    assert vals.min() > -1e-10
    assert vals.max() < 2 + 1e-10


def test_normalized_laplacian_isolated_node():
    W = np.zeros((3, 3))
    W[0, 1] = W[1, 0] = 1.0
    g = SimilarityGraph(n=3, weights=W, kind="test")
    with pytest.raises(ValueError, match="isolated-node"):
        laplacian(g, "symmetric-normalized")


def test_laplacian_ignores_stored_diagonal():
    W = np.array([[0.0, 0.5], [0.5, 0.0]])
    bare = SimilarityGraph(n=2, weights=W, kind="test")
    loop = SimilarityGraph(n=2, weights=W + np.eye(2), kind="test")
    assert np.allclose(laplacian(bare), laplacian(loop))
    assert np.allclose(laplacian(bare, "symmetric-normalized"),
                       laplacian(loop, "symmetric-normalized"))


def test_laplacian_unknown_kind():
    g = SimilarityGraph(n=2, weights=np.array([[0.0, 1.0], [1.0, 0.0]]),
                        kind="test")
    with pytest.raises(ValueError, match="kind must be"):
        laplacian(g, "random-walk")


def test_dirichlet_energy_constant_is_zero():
    D = line_distances([0.0, 0.4, 0.9])
    assert dirichlet_energy(D, 1.0, 1, 1.0, np.full(3, 3.3)) == 0.0


def test_dirichlet_energy_hand_value():
    # m=1, n=2, eps=1, u=(1,0): 3/(2*1*2) * 2 = 1.5
    D = line_distances([0.0, 0.5])
    assert dirichlet_energy(D, 1.0, 1, 1.0, [1.0, 0.0]) == pytest.approx(1.5)


def test_dirichlet_energy_shift_invariant():
    rng = np.random.default_rng(5)
    D = squareform(pdist(rng.random((15, 2))))
    u = rng.standard_normal(15)
    e0 = dirichlet_energy(D, 0.5, 2, 1.0, u)
    e1 = dirichlet_energy(D, 0.5, 2, 1.0, u + 11.0)
    assert e1 == pytest.approx(e0, rel=1e-10)


def test_dirichlet_energy_matches_quadratic_form():
    rng = np.random.default_rng(6)
    D = squareform(pdist(rng.random((20, 3))))
    L = laplacian(epsilon_graph(D, 0.6, 2)).toarray()
    for _ in range(100):
        u = rng.standard_normal(20)
        e = dirichlet_energy(D, 0.6, 2, 1.0, u)
        assert abs(e - u @ L @ u) < 1e-10 * (1 + abs(e))


def test_edge_list_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    D = squareform(pdist(rng.random((12, 3))))
    g = epsilon_graph(D, 0.7, 2, vol=4 * math.pi)
    path = tmp_path / "edges.txt"
    export_edges(g, path)
    back = load_edges(path)
    assert back.n == g.n
    assert back.kind == g.kind
    assert np.allclose(back.dense(), g.dense(), atol=1e-15)


def test_edge_list_round_trip_self_tuning(tmp_path):
    D = line_distances([0.0, 1.0, 3.0])
    g = self_tuning_graph(D, 1)
    path = tmp_path / "edges.txt"
    export_edges(g, path)
    back = load_edges(path)
    # the unit diagonal is restored for self-tuning graphs
    assert np.allclose(back.dense(), g.dense(), atol=1e-15)


def test_edge_list_count_mismatch(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("3 2 epsilon\n0 1 0.5\n")
    with pytest.raises(ValueError, match="count mismatch"):
        load_edges(path)
