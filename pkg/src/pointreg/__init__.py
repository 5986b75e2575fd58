"""Local regularization of noisy point clouds near a low-dimensional set.

The package covers the full pipeline: manifold samplers with bounded
noise, local averaging regularizers, similarity graphs and Laplacians,
spectral analysis with closed-form sphere references, radius/error
bounds, graph-based probit classification, and a seeded experiment
harness with CSV outputs.
"""

from .bounds import (Assumption3Report, GeometryParams, alpha_m,
                     assumption3_check, eta_bound, failure_probability,
                     r_bounds, r_difference_bound)
from .classify import (ClassifierResult, CVResult, ProbitClassifier,
                       ProbitProblem, count_unlabeled_errors, cross_validate,
                       fit_probit, log_normal_cdf, probit_objective)
from .cloud import (PointCloud, add_noise, load_cloud, save_cloud,
                    sphere_geodesic, sphere_uniform, two_moons)
from .experiments import (ExperimentConfig, MaskedDistanceReport, MnistData,
                          MnistSubset, StageError, config_from_ini,
                          epsilon_mask, load_mnist_idx, masked_distance_report,
                          mnist_dir, mutual_knn_mask, run_experiment,
                          select_pair)
from .graphs import (SimilarityGraph, dirichlet_energy, epsilon_graph,
                     export_edges, knn_restrict, laplacian, load_edges,
                     self_tuning_graph)
from .regularize import (BallAverage, KNNAverage, SelfTuningAverage,
                         ball_average, knn_average, self_tuning_average)
from .spectral import (SandwichReport, Spectrum, export_spectrum_csv,
                       load_spectrum_csv, measure_eta, sandwich_check,
                       smallest_eigs, spectral_error, sphere_spectrum)

__version__ = "0.1.0"

__all__ = [
    "Assumption3Report", "BallAverage", "CVResult", "ClassifierResult",
    "ExperimentConfig", "GeometryParams", "KNNAverage",
    "MaskedDistanceReport", "MnistData", "MnistSubset", "PointCloud",
    "ProbitClassifier", "ProbitProblem", "SandwichReport",
    "SelfTuningAverage", "SimilarityGraph", "Spectrum", "StageError",
    "add_noise", "alpha_m", "assumption3_check", "ball_average",
    "config_from_ini", "count_unlabeled_errors", "cross_validate",
    "dirichlet_energy", "epsilon_graph", "epsilon_mask", "eta_bound",
    "export_edges", "export_spectrum_csv", "failure_probability",
    "fit_probit", "knn_average", "knn_restrict", "laplacian", "load_cloud",
    "load_edges", "load_mnist_idx", "load_spectrum_csv", "log_normal_cdf",
    "masked_distance_report", "measure_eta", "mnist_dir", "mutual_knn_mask",
    "probit_objective", "r_bounds", "r_difference_bound", "run_experiment",
    "sandwich_check", "save_cloud", "select_pair", "self_tuning_average",
    "self_tuning_graph", "smallest_eigs", "spectral_error",
    "sphere_geodesic", "sphere_spectrum", "sphere_uniform", "two_moons",
]
