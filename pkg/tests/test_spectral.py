import numpy as np
import pytest
import scipy.sparse as sp
from scipy.spatial.distance import pdist, squareform

from pointreg.graphs import (SimilarityGraph, dirichlet_energy,
                             epsilon_graph, laplacian)
from pointreg.spectral import (Spectrum, export_spectrum_csv,
                               load_spectrum_csv, measure_eta,
                               sandwich_check, smallest_eigs, spectral_error,
                               sphere_spectrum)


def line_distances(values):
    pts = np.asarray(values, dtype=float)[:, None]
    return squareform(pdist(pts))


def path_laplacian(n, w=1.0):
    main = np.full(n, 2.0 * w)
    main[0] = main[-1] = w
    off = np.full(n - 1, -w)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def test_two_node_spectrum():
    w = 0.7
    g = SimilarityGraph(n=2, weights=np.array([[0.0, w], [w, 0.0]]),
                        kind="test")
    spec = smallest_eigs(laplacian(g), 2)
    assert np.allclose(spec.values, [0.0, 2 * w], atol=1e-12)


def test_three_node_path_spectrum():
    L = path_laplacian(3)
    spec = smallest_eigs(L, 3)
    assert np.allclose(spec.values, [0.0, 1.0, 3.0], atol=1e-12)


def test_connected_graph_constant_kernel():
    rng = np.random.default_rng(0)
    D = squareform(pdist(rng.random((40, 3))))
    L = laplacian(epsilon_graph(D, 1.0, 2))
    spec = smallest_eigs(L, 3)
    assert abs(spec.values[0]) < 1e-10
    v = spec.vectors[:, 0]
    assert np.allclose(v, v.mean(), atol=1e-8)


def test_iterative_branch_matches_path_analytics():
    # n above the dense cutoff exercises the shift-invert solver; the
    # unit-weight path has eigenvalues 2 - 2 cos(pi k / n)
    n = 2100
    spec = smallest_eigs(path_laplacian(n), 8)
    expected = 2 - 2 * np.cos(np.pi * np.arange(8) / n)
    assert np.allclose(spec.values, expected, atol=1e-8)


def test_eigenpairs_satisfy_residual_bound():
    rng = np.random.default_rng(1)
    D = squareform(pdist(rng.random((30, 3))))
    L = laplacian(epsilon_graph(D, 0.8, 2))
    spec = smallest_eigs(L, 6)
    L = L.toarray()
    for lam, v in zip(spec.values, spec.vectors.T):
        assert np.linalg.norm(L @ v - lam * v) < 1e-9 * max(1.0, lam)


def test_k_larger_than_n_rejected():
    with pytest.raises(ValueError):
        smallest_eigs(np.eye(3), 4)


def test_sphere_spectrum_prefixes():
    assert np.array_equal(sphere_spectrum(1), [0.0])
    assert np.array_equal(sphere_spectrum(9),
                          [0, 2, 2, 2, 6, 6, 6, 6, 6])
    k16 = sphere_spectrum(16)
    assert np.array_equal(k16[:9], [0, 2, 2, 2, 6, 6, 6, 6, 6])
    assert np.array_equal(k16[9:], [12.0] * 7)


def test_spectral_error_band_example():
    errs = spectral_error([0.0, 2.2, 1.8], [0.0, 2.0, 2.0])
    assert np.allclose(errs, [0.0, 0.1, 0.1])


def test_spectral_error_first_index_absolute():
    errs = spectral_error([0.03, 2.0], [0.0, 2.0])
    assert errs[0] == pytest.approx(0.03)


def test_spectral_error_length_mismatch():
    with pytest.raises(ValueError, match="length-mismatch"):
        spectral_error([0.0, 1.0], [0.0, 1.0, 2.0])


def test_measure_eta_identical_distances():
    rng = np.random.default_rng(2)
    D = squareform(pdist(rng.random((10, 2))))
    assert measure_eta(D, D, 0.5) == 0.0


def test_measure_eta_ignores_far_pairs():
    # the only perturbed pair sits far beyond eps, so the restricted
    # second pass reports zero discrepancy
    DX = line_distances([0.0, 1.0, 5.0])
    DY = line_distances([0.0, 1.0, 5.3])
    assert measure_eta(DX, DY, 2.0) == 0.0
    assert measure_eta(DX, DY, 4.5) == pytest.approx(0.3)


def test_measure_eta_shape_mismatch():
    with pytest.raises(ValueError, match="shape-mismatch"):
        measure_eta(np.zeros((2, 2)), np.zeros((3, 3)), 1.0)


def test_sandwich_trivial_at_zero_eta():
    rng = np.random.default_rng(3)
    D = squareform(pdist(rng.random((25, 3))))
    report = sandwich_check(D, D, 0.6, 2, k=5)
    assert report.eta == 0.0
    assert report.all_passed
    assert np.allclose(report.lower, report.upper)


def test_sandwich_small_perturbation_passes():
    rng = np.random.default_rng(4)
    D = squareform(pdist(rng.random((30, 3))))
    noise = rng.uniform(-0.01, 0.01, size=D.shape)
    noise = np.triu(noise, k=1)
    DY = D + noise + noise.T
    report = sandwich_check(D, DY, 0.5, 2, k=10)
    assert 0.0 < report.eta < 0.021
    assert report.all_passed
    assert np.all(report.lower <= report.upper + 1e-12)


def test_sandwich_eta_too_large():
    DX = line_distances([0.0, 0.2, 0.4])
    DY = line_distances([0.0, 1.4, 2.8])
    with pytest.raises(ValueError, match="eta-too-large"):
        sandwich_check(DX, DY, 0.3, 1)


def test_scaled_eigenvalues_monotone_in_eps():
    # shrinking eps and rescaling by (eps'/eps)^(m+2) keeps the same
    # per-edge weight on a subset of edges, an operator lower bound
    rng = np.random.default_rng(5)
    D = squareform(pdist(rng.random((35, 3))))
    m = 2

    def eigs(e):
        L = laplacian(epsilon_graph(D, e, m))
        return smallest_eigs(L, 10).values

    e_small, e_big = 0.45, 0.55
    scaled = (e_small / e_big) ** (m + 2) * eigs(e_small)
    full = eigs(e_big)
    assert np.all(scaled <= full + 1e-8 * np.maximum(1.0, np.abs(full)))


def test_quotient_convention_matches_energy_quotient():
    # the quotient eigenvalue equals the neighborhood energy divided by
    # the 1/n-weighted squared norm, evaluated at each eigenvector
    rng = np.random.default_rng(6)
    n = 20
    D = squareform(pdist(rng.random((n, 3))))
    eps, m = 0.7, 2
    L = laplacian(epsilon_graph(D, eps, m))
    spec = smallest_eigs(L, 6)
    assert np.allclose(spec.quotient_values, n * spec.values)
    for lam_q, v in zip(spec.quotient_values[1:], spec.vectors.T[1:]):
        quotient = dirichlet_energy(D, eps, m, 1.0, v) / (v @ v / n)
        assert quotient == pytest.approx(lam_q, rel=1e-8, abs=1e-8)


def test_spectrum_csv_round_trip(tmp_path):
    values = np.array([0.0, 2.1, 2.2])
    vectors = np.eye(3)
    spec = Spectrum(values=values, vectors=vectors, n=50)
    path = tmp_path / "spectrum.csv"
    export_spectrum_csv(path, spec, reference=[0.0, 2.0, 2.0])
    back = load_spectrum_csv(path)
    assert np.array_equal(back["index"], [1, 2, 3])
    assert np.allclose(back["value_matrix_convention"], values)
    assert np.allclose(back["value_paper_convention"], 50 * values)
    assert np.allclose(back["reference"], [0.0, 2.0, 2.0])
    assert back["relative_error"][1] == pytest.approx(0.05)


def test_spectrum_csv_without_reference(tmp_path):
    spec = Spectrum(values=np.array([0.0, 1.0]), vectors=None, n=4)
    path = tmp_path / "spectrum.csv"
    export_spectrum_csv(path, spec)
    back = load_spectrum_csv(path)
    assert "reference" not in back
    text = path.read_text().splitlines()
    assert text[0] == ("index,value_paper_convention,"
                      "value_matrix_convention,reference,relative_error")
