"""Experiment harness: distance reports, MNIST ingestion, seeded runs.

Everything here is orchestration over the core modules.  The building
blocks are per-cell functions (one sigma, one seed) shared by the CLI
reproduction runners and the acceptance checks, so both execute exactly
the same pipeline.  All outputs are CSV plus a key=value manifest, with
no timestamps, so re-running a configuration is bit-identical.
"""

from __future__ import annotations

import configparser
import gzip
import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse.linalg as spla
from scipy.spatial.distance import pdist, squareform

from .classify import (ProbitProblem, count_unlabeled_errors, cross_validate,
                       fit_probit)
from .cloud import add_noise, sphere_uniform, two_moons
from .graphs import epsilon_graph, knn_restrict, laplacian, self_tuning_graph
from .regularize import BallAverage, KNNAverage, SelfTuningAverage, \
    ball_average
from .spectral import smallest_eigs, sphere_spectrum, export_spectrum_csv
from .validation import as_cloud, as_distances, as_rng, check_count, \
    check_positive

_FMT = "%.17g"


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return _FMT % float(value)


# ---------------------------------------------------------------------------
# masks and masked distance reports

def epsilon_mask(D, eps: float) -> np.ndarray:
    """Boolean mask of pairs at distance strictly below eps."""
    D = as_distances(D)
    check_positive(eps, "eps")
    mask = D < eps
    np.fill_diagonal(mask, False)
    return mask


def mutual_knn_mask(D, K: int) -> np.ndarray:
    """Pairs where each point is among the other's K nearest neighbors.

    Neighbor ties resolve toward the smaller index, matching the graph
    constructions.
    """
    D = as_distances(D)
    n = D.shape[0]
    check_count(K, "K")
    if K > n - 1:
        raise ValueError(f"K={K} needs at least {K + 1} points")
    work = D.copy()
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")[:, :K]
    onesided = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), K)
    onesided[rows, order.ravel()] = True
    return onesided & onesided.T


def operator_norm(A: np.ndarray) -> float:
    """Largest singular value of a symmetric matrix.

    Dense for small inputs; a single Lanczos largest-magnitude
    eigenvalue otherwise, with a dense fallback if iteration stalls.
    """
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        return 0.0
    if A.shape[0] <= 400:
        return float(np.linalg.norm(A, 2))
    try:
        val = spla.eigsh(A, k=1, which="LM", return_eigenvectors=False)
        return float(abs(val[0]))
    except spla.ArpackNoConvergence:
        return float(np.max(np.abs(np.linalg.eigvalsh(A))))


@dataclass
class MaskedDistanceReport:
    """Distance-matrix discrepancies restricted to a mask.

    frob_raw and frob_reg are the norms of the masked differences
    D_X - D_Y and D_X - D_Ybar; max_raw and max_reg are the
    corresponding entrywise maxima; pair_count counts unordered masked
    pairs.
    """

    frob_raw: float
    frob_reg: float
    max_raw: float
    max_reg: float
    mask: str
    pair_count: int


def _resolve_mask(descriptor, D_X: np.ndarray):
    if isinstance(descriptor, str):
        name, _, arg = descriptor.partition(":")
        if not arg:
            name, _, arg = descriptor.rstrip(")").partition("(")
        descriptor = (name.strip(), float(arg))
    kind, param = descriptor
    if kind == "epsilon":
        return epsilon_mask(D_X, float(param)), f"epsilon({_fmt(float(param))})"
    if kind == "mutual-knn":
        return mutual_knn_mask(D_X, int(param)), f"mutual-knn({int(param)})"
    raise ValueError(f"unknown mask kind {kind!r}")


def masked_distance_report(X, Y, Ybar, mask) -> MaskedDistanceReport:
    """Compare raw and regularized distances against the clean cloud.

    The mask descriptor is ("epsilon", eps) or ("mutual-knn", K), or the
    equivalent "kind:param" string, and is always evaluated on the clean
    distances.
    """
    X = _points_of(X)
    Y = _points_of(Y)
    Ybar = _points_of(Ybar)
    if not (X.shape[0] == Y.shape[0] == Ybar.shape[0]):
        raise ValueError("shape-mismatch: clouds must have equal n")
    D_X = squareform(pdist(X))
    D_Y = squareform(pdist(Y))
    D_R = squareform(pdist(Ybar))
    bool_mask, descriptor = _resolve_mask(mask, D_X)
    diff_raw = (D_X - D_Y) * bool_mask
    diff_reg = (D_X - D_R) * bool_mask
    pair_count = int(bool_mask.sum()) // 2
    return MaskedDistanceReport(
        frob_raw=operator_norm(diff_raw),
        frob_reg=operator_norm(diff_reg),
        max_raw=float(np.max(np.abs(diff_raw))) if pair_count else 0.0,
        max_reg=float(np.max(np.abs(diff_reg))) if pair_count else 0.0,
        mask=descriptor,
        pair_count=pair_count)


def _points_of(cloud) -> np.ndarray:
    return as_cloud(getattr(cloud, "points", cloud))


# ---------------------------------------------------------------------------
# MNIST ingestion

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049


@dataclass
class MnistData:
    """Full decoded dataset: images scaled to [0, 1], digit labels."""

    images: np.ndarray
    labels: np.ndarray


@dataclass
class MnistSubset:
    """A binary digit-pair subsample with labels mapped to +-1."""

    images: np.ndarray
    digits: np.ndarray
    labels: np.ndarray
    a: int
    b: int
    indices: np.ndarray


def mnist_dir() -> Path:
    """MNIST data directory, overridable through POINTREG_MNIST_DIR."""
    return Path(os.environ.get("POINTREG_MNIST_DIR", "data/mnist"))


def _read_bytes(path) -> bytes:
    with open(path, "rb") as fh:
        head = fh.read(2)
        fh.seek(0)
        if head == b"\x1f\x8b":
            with gzip.open(fh) as gz:
                return gz.read()
        return fh.read()


def load_mnist_idx(images_path, labels_path) -> MnistData:
    """Decode a big-endian IDX image/label file pair.

    Accepts plain or gzip-compressed files.  Pixels are scaled by
    1/255; image and label counts must agree.
    """
    raw = _read_bytes(images_path)
    if len(raw) < 16:
        raise ValueError(f"truncated-file: {images_path}")
    magic, count, rows, cols = struct.unpack(">iiii", raw[:16])
    if magic != IMAGE_MAGIC:
        raise ValueError(f"bad-magic: expected {IMAGE_MAGIC}, got {magic} "
                         f"in {images_path}")
    expected = 16 + count * rows * cols
    if len(raw) != expected:
        raise ValueError(f"truncated-file: expected {expected} bytes, "
                         f"found {len(raw)} in {images_path}")
    images = np.frombuffer(raw, dtype=np.uint8, offset=16)
    images = images.reshape(count, rows * cols).astype(float) / 255.0

    raw = _read_bytes(labels_path)
    if len(raw) < 8:
        raise ValueError(f"truncated-file: {labels_path}")
    magic, label_count = struct.unpack(">ii", raw[:8])
    if magic != LABEL_MAGIC:
        raise ValueError(f"bad-magic: expected {LABEL_MAGIC}, got {magic} "
                         f"in {labels_path}")
    if len(raw) != 8 + label_count:
        raise ValueError(f"truncated-file: expected {8 + label_count} bytes, "
                         f"found {len(raw)} in {labels_path}")
    labels = np.frombuffer(raw, dtype=np.uint8, offset=8).astype(int)
    if label_count != count:
        raise ValueError(f"count-mismatch: {count} images vs "
                         f"{label_count} labels")
    return MnistData(images=images, labels=labels)


def load_mnist_train(directory=None) -> MnistData:
    directory = Path(directory) if directory is not None else mnist_dir()
    return load_mnist_idx(directory / "train-images-idx3-ubyte.gz",
                          directory / "train-labels-idx1-ubyte.gz")


def select_pair(dataset, a: int, b: int, n: int, seed) -> MnistSubset:
    """Sample n images uniformly from the union of digits a and b.

    Labels map a -> +1 and b -> -1.  Deterministic given the seed; a
    Generator may be passed to continue an existing stream.
    """
    if isinstance(dataset, MnistData):
        images, labels = dataset.images, dataset.labels
    else:
        images, labels = dataset
    check_count(n, "n")
    union = np.flatnonzero((labels == a) | (labels == b))
    if union.size < n:
        raise ValueError(f"insufficient-data: {union.size} images of digits "
                         f"{a} and {b}, need {n}")
    rng = as_rng(seed)
    chosen = np.sort(rng.choice(union, size=n, replace=False))
    digits = labels[chosen]
    return MnistSubset(images=images[chosen], digits=digits,
                       labels=np.where(digits == a, 1, -1), a=a, b=b,
                       indices=chosen)


# ---------------------------------------------------------------------------
# per-cell protocol pieces

def sphere_r_schedule(sigma: float) -> float:
    """Averaging radius for the sphere runs: sqrt(sigma)/3 at sigma=0.1,
    sqrt(sigma) otherwise."""
    check_positive(sigma, "sigma")
    if math.isclose(sigma, 0.1):
        return math.sqrt(sigma) / 3.0
    return math.sqrt(sigma)


def sphere_eps(n: int) -> float:
    """Connectivity radius 2 n^(-1/4) for the sphere graphs."""
    return 2.0 * n ** -0.25


def sphere_distance_cell(sigma: float, seed: int, n: int = 3000,
                         d: int = 100, noise_mode: str = "ambient-ball",
                         r: float | None = None,
                         eps: float | None = None) -> dict:
    """One (sigma, seed) run of the sphere distance-table protocol."""
    rng = np.random.default_rng(seed)
    X = sphere_uniform(n, d, rng)
    Y = add_noise(X, sigma, mode=noise_mode, rng=rng)
    if r is None:
        r = sphere_r_schedule(sigma)
    if eps is None:
        eps = sphere_eps(n)
    Ybar = ball_average(Y, r)
    report = masked_distance_report(X, Y, Ybar, ("epsilon", eps))
    return {"sigma": sigma, "seed": seed, "r": r, "eps": eps,
            "frob_raw": report.frob_raw, "frob_reg": report.frob_reg,
            "max_raw": report.max_raw, "max_reg": report.max_reg,
            "pair_count": report.pair_count}


def sphere_spectrum_cell(sigma: float, seed: int, stage: str,
                         k: int = 100, n: int = 3000, d: int = 100,
                         vol: float = 4.0 * math.pi):
    """Smallest-k spectrum of the epsilon-graph Laplacian for one stage.

    stage selects the cloud: "clean" X, "raw" Y, or "regularized" Ybar
    with the standard r schedule.
    """
    rng = np.random.default_rng(seed)
    X = sphere_uniform(n, d, rng)
    if stage == "clean":
        points = X
    else:
        Y = add_noise(X, sigma, mode="ambient-ball", rng=rng)
        if stage == "raw":
            points = Y
        elif stage == "regularized":
            points = ball_average(Y, sphere_r_schedule(sigma))
        else:
            raise ValueError(f"unknown stage {stage!r}")
    D = squareform(pdist(points))
    graph = epsilon_graph(D, sphere_eps(n), m=2, vol=vol)
    return smallest_eigs(laplacian(graph, "unnormalized"), k)


def spectrum_band_deviation(values: np.ndarray) -> float:
    """Relative deviation of the two lowest sphere eigenvalue bands.

    Compares the mean of eigenvalues 2-4 against 2 and the mean of
    eigenvalues 5-9 against 6 (1-based positions; the continuum values
    with multiplicities 3 and 5), summing the relative errors.
    """
    values = np.asarray(values, dtype=float)
    if len(values) < 9:
        raise ValueError("need at least 9 eigenvalues")
    band1 = float(np.mean(values[1:4]))
    band2 = float(np.mean(values[4:9]))
    return abs(band1 - 2.0) / 2.0 + abs(band2 - 6.0) / 6.0


def stratified_labels(truth: np.ndarray, per_class: int, rng) -> np.ndarray:
    """Pick per_class labeled indices from each of +1 and -1, in order."""
    if per_class < 1:
        raise ValueError("insufficient-labels: need at least one labeled "
                         "point per class")
    rng = as_rng(rng)
    picks = []
    for cls in (1, -1):
        pool = np.flatnonzero(truth == cls)
        if pool.size < per_class:
            raise ValueError(f"insufficient-labels: class {cls} has only "
                             f"{pool.size} points")
        picks.append(rng.choice(pool, size=per_class, replace=False))
    return np.sort(np.concatenate(picks))


def moons_cell(sigma: float, seed: int, n: int = 1000, d: int = 100,
               K: int = 10, labels_per_class: int = 5,
               gamma: float = 0.1, stages=("clean", "raw", "regularized"),
               with_report: bool = True) -> dict:
    """One (sigma, seed) run of the two-moons classification protocol.

    Classifies the clean, raw, and ball-regularized clouds (r = sigma)
    over fully-connected self-tuning graphs and reports unlabeled error
    counts, plus the mutual-KNN masked distance report.
    """
    rng = np.random.default_rng(seed)
    X, truth = two_moons(n, d, rng)
    Y = add_noise(X, sigma, mode="ambient-ball", rng=rng)
    labeled_idx = stratified_labels(truth, labels_per_class, rng)
    labeled_val = truth[labeled_idx].astype(float)
    Ybar = ball_average(Y, sigma)
    clouds = {"clean": X, "raw": Y, "regularized": Ybar}
    row = {"sigma": sigma, "seed": seed}
    for stage in stages:
        D = squareform(pdist(clouds[stage]))
        graph = self_tuning_graph(D, K)
        problem = ProbitProblem(graph, labeled_idx, labeled_val, gamma=gamma)
        result = fit_probit(problem)
        row[f"errors_{stage}"] = count_unlabeled_errors(
            result.predictions, truth, labeled_idx)
    if with_report:
        report = masked_distance_report(X, Y, Ybar, ("mutual-knn", K))
        row["frob_raw"] = report.frob_raw
        row["frob_reg"] = report.frob_reg
    row["labeled_idx"] = labeled_idx
    row["clouds"] = clouds
    row["truth"] = truth
    return row


def mnist_radius_grid(D_Y: np.ndarray, quantiles=(0.05, 0.1, 0.2, 0.35,
                                                  0.5)) -> list:
    """Candidate ball radii from quantiles of the observed distances."""
    n = D_Y.shape[0]
    offdiag = D_Y[np.triu_indices(n, k=1)]
    return [float(q) for q in np.quantile(offdiag, quantiles)]


def mnist_cell(seed: int, dataset=None, a: int = 4, b: int = 9,
               n: int = 1000, K: int = 20, labels_per_class: int = 20,
               gamma: float = 0.1, cv_repeats: int = 5,
               grid_radii=None) -> dict:
    """One seed of the MNIST digit-pair protocol.

    Subsamples the pair, picks stratified labels, selects a ball radius
    by two-fold cross-validation on the labels, then classifies raw and
    regularized images over fully-connected self-tuning graphs and
    their K-NN restrictions.
    """
    if dataset is None:
        dataset = load_mnist_train()
    rng = np.random.default_rng(seed)
    subset = select_pair(dataset, a, b, n, rng)
    truth = subset.labels
    labeled_idx = stratified_labels(truth, labels_per_class, rng)
    labeled_val = truth[labeled_idx].astype(float)

    Y = subset.images
    D_Y = squareform(pdist(Y))
    if grid_radii is None:
        grid_radii = mnist_radius_grid(D_Y)
    grid = [BallAverage(r=r) for r in grid_radii]
    cv = cross_validate(Y, labeled_idx, labeled_val, grid, graph_K=K,
                        repeats=cv_repeats, rng=rng, gamma=gamma)
    r_selected = cv.best_param
    Ybar = BallAverage(r=r_selected).fit(Y).transform(Y)
    D_R = squareform(pdist(Ybar))

    row = {"seed": seed, "r_selected": r_selected, "cv_table": cv.table}
    for tag, D in (("raw", D_Y), ("reg", D_R)):
        graph = self_tuning_graph(D, K)
        for variant, g in (("full", graph),
                           ("knn", knn_restrict(graph, D, K))):
            problem = ProbitProblem(g, labeled_idx, labeled_val, gamma=gamma)
            result = fit_probit(problem)
            row[f"errors_{tag}_{variant}"] = count_unlabeled_errors(
                result.predictions, truth, labeled_idx)
    row["labeled_idx"] = labeled_idx
    row["images_raw"] = Y
    row["images_reg"] = Ybar
    row["digits"] = subset.digits
    return row


# ---------------------------------------------------------------------------
# configuration

_SAMPLERS = ("sphere", "two-moons", "mnist")
_TASKS = ("distance-table", "spectrum", "classify")


@dataclass
class ExperimentConfig:
    """Declarative description of one seeded experiment run."""

    sampler: str = "sphere"
    n: int = 3000
    d: int = 100
    digit_a: int = 4
    digit_b: int = 9
    sigma: float = 0.5
    noise_mode: str = "ambient-ball"
    regularizer: str = "ball"
    param: float | None = None
    grid: list = field(default_factory=list)
    graph: str = "epsilon"
    eps: float | None = None
    m: int = 2
    vol: float = 1.0
    K: int = 10
    restrict: str | None = None
    restrict_K: int | None = None
    task: str = "distance-table"
    mask_kind: str = "epsilon"
    mask_param: float | None = None
    spectrum_k: int = 100
    labels_per_class: int = 5
    gamma: float = 0.1
    cv_repeats: int = 5
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    outdir: str = "runs/experiment"

    def __post_init__(self):
        if self.sampler not in _SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.task not in _TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.regularizer not in ("ball", "knn", "self-tuning"):
            raise ValueError(f"unknown regularizer {self.regularizer!r}")
        if self.graph not in ("epsilon", "self-tuning"):
            raise ValueError(f"unknown graph kind {self.graph!r}")
        if self.sampler != "mnist" and self.sigma is not None:
            check_positive(self.sigma, "sigma")
        if not self.seeds:
            raise ValueError("seeds list must be non-empty")

    def regularizer_entries(self) -> list:
        params = self.grid if self.grid else [self.param]
        if params == [None]:
            raise ValueError("regularizer needs param or grid")
        maker = {"ball": lambda p: BallAverage(r=float(p)),
                 "knn": lambda p: KNNAverage(k=int(p)),
                 "self-tuning": lambda p: SelfTuningAverage(K=int(p))}
        return [maker[self.regularizer](p) for p in params]

    def manifest(self) -> dict:
        items = {}
        for key, value in vars(self).items():
            if isinstance(value, list):
                items[key] = ",".join(str(v) for v in value)
            else:
                items[key] = "" if value is None else str(value)
        return items


def config_from_ini(path) -> ExperimentConfig:
    """Parse a sectioned key=value file into an ExperimentConfig.

    Sections group related keys ([sampler], [noise], [regularizer],
    [graph], [task], [output]) but key names are globally unique, so a
    flat file with a single section works too.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValueError(f"missing-config: {path}")
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[key] = value
    kwargs = {}
    conv = {"n": int, "d": int, "digit_a": int, "digit_b": int,
            "sigma": float, "param": float, "eps": float, "m": int,
            "vol": float, "K": int, "restrict_K": int, "spectrum_k": int,
            "labels_per_class": int, "gamma": float, "cv_repeats": int,
            "mask_param": float}
    names = {f.lower(): f for f in ExperimentConfig.__dataclass_fields__}
    for key, value in flat.items():
        name = names.get(key.lower())
        if name is None:
            raise ValueError(f"unknown-config-key: {key}")
        if name == "seeds":
            kwargs[name] = [int(s) for s in value.split(",") if s.strip()]
        elif name == "grid":
            kwargs[name] = [float(s) for s in value.split(",") if s.strip()]
        elif name in conv:
            kwargs[name] = conv[name](value)
        elif name in ("restrict",) and value.lower() in ("", "none"):
            kwargs[name] = None
        else:
            kwargs[name] = value
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# seeded run orchestration

class StageError(RuntimeError):
    """An error attributed to one pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _write_csv(path: Path, header: list, rows: list):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(outdir: Path, cfg: ExperimentConfig):
    items = cfg.manifest()
    lines = [f"{k}={items[k]}" for k in sorted(items)]
    (outdir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _sample(cfg: ExperimentConfig, rng):
    """Clean points plus ground-truth labels (None when unlabeled)."""
    if cfg.sampler == "sphere":
        return sphere_uniform(cfg.n, cfg.d, rng), None
    if cfg.sampler == "two-moons":
        return two_moons(cfg.n, cfg.d, rng)
    raise ValueError("mnist sampling is handled separately")


def run_experiment(cfg: ExperimentConfig):
    """Execute one configuration over its seeds; returns the run directory.

    Writes task CSVs, a manifest of every resolved parameter and seed,
    and one log per seed.  Errors carry the pipeline stage that raised
    them.
    """
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_manifest(outdir, cfg)
    rows = []
    for seed in cfg.seeds:
        log: list = []
        try:
            rows.extend(_run_seed(cfg, seed, outdir, log))
        except StageError:
            raise
        except Exception as exc:
            stage = log[-1].split()[0] if log else "setup"
            raise StageError(stage, exc) from exc
        finally:
            (outdir / f"run_seed{seed}.log").write_text(
                "\n".join(log) + "\n" if log else "")
    if cfg.task == "distance-table":
        _write_csv(outdir / "distance_table.csv",
                   ["sigma", "seed", "r", "eps", "frob_raw", "frob_reg",
                    "max_raw", "max_reg", "pair_count"], rows)
    elif cfg.task == "classify":
        _write_csv(outdir / "errors.csv",
                   ["seed", "unlabeled_errors"], rows)
    return outdir


def _run_seed(cfg: ExperimentConfig, seed: int, outdir: Path,
              log: list) -> list:
    rng = np.random.default_rng(seed)
    if cfg.sampler == "mnist":
        log.append(f"sample mnist pair=({cfg.digit_a},{cfg.digit_b}) "
                   f"n={cfg.n} seed={seed}")
        subset = select_pair(load_mnist_train(), cfg.digit_a, cfg.digit_b,
                             cfg.n, rng)
        X, truth, Y = None, subset.labels, subset.images
    else:
        log.append(f"sample {cfg.sampler} n={cfg.n} d={cfg.d} seed={seed}")
        X, truth = _sample(cfg, rng)
        log.append(f"noise sigma={_fmt(cfg.sigma)} mode={cfg.noise_mode}")
        Y = add_noise(X, cfg.sigma, mode=cfg.noise_mode, rng=rng)

    log.append(f"regularize kind={cfg.regularizer}")
    entries = cfg.regularizer_entries()

    if cfg.task == "distance-table":
        if X is None:
            raise ValueError("distance tables need a clean reference cloud")
        Ybar = entries[0].fit(Y).transform(Y)
        mask_param = cfg.mask_param
        if mask_param is None:
            mask_param = sphere_eps(cfg.n) if cfg.mask_kind == "epsilon" \
                else cfg.K
        log.append(f"task distance-table mask={cfg.mask_kind}")
        report = masked_distance_report(X, Y, Ybar,
                                        (cfg.mask_kind, mask_param))
        r_val = getattr(entries[0], "r", 0.0)
        return [(cfg.sigma, seed, r_val,
                 mask_param if cfg.mask_kind == "epsilon" else 0.0,
                 report.frob_raw, report.frob_reg, report.max_raw,
                 report.max_reg, report.pair_count)]

    if cfg.task == "spectrum":
        Ybar = entries[0].fit(Y).transform(Y)
        log.append(f"task spectrum k={cfg.spectrum_k}")
        reference = sphere_spectrum(cfg.spectrum_k) \
            if cfg.sampler == "sphere" else None
        for stage, points in (("clean", X), ("raw", Y),
                              ("regularized", Ybar)):
            if points is None:
                continue
            D = squareform(pdist(points))
            eps = cfg.eps if cfg.eps is not None else sphere_eps(cfg.n)
            graph = epsilon_graph(D, eps, m=cfg.m, vol=cfg.vol)
            spectrum = smallest_eigs(laplacian(graph, "unnormalized"),
                                     cfg.spectrum_k)
            export_spectrum_csv(
                outdir / f"spectrum_{stage}_seed{seed}.csv", spectrum,
                reference=reference)
        return []

    # classify
    if truth is None:
        raise ValueError("classification needs labeled ground truth")
    log.append(f"task classify labels_per_class={cfg.labels_per_class}")
    labeled_idx = stratified_labels(truth, cfg.labels_per_class, rng)
    labeled_val = truth[labeled_idx].astype(float)
    if len(entries) > 1:
        cv = cross_validate(Y, labeled_idx, labeled_val, entries,
                            graph_K=cfg.K, repeats=cfg.cv_repeats, rng=rng,
                            gamma=cfg.gamma, restrict=cfg.restrict,
                            restrict_K=cfg.restrict_K)
        _write_csv(outdir / f"cv_table_seed{seed}.csv",
                   ["param", "mean_error"],
                   [(t["param"], t["mean_error"]) for t in cv.table])
        chosen = entries[cv.best_index]
    else:
        chosen = entries[0]
    Ybar = chosen.fit(Y).transform(Y)
    D = squareform(pdist(Ybar))
    graph = self_tuning_graph(D, cfg.K)
    if cfg.restrict is not None:
        graph = knn_restrict(graph, D, cfg.restrict_K or cfg.K,
                             rule=cfg.restrict)
    problem = ProbitProblem(graph, labeled_idx, labeled_val, gamma=cfg.gamma)
    result = fit_probit(problem)
    errors = count_unlabeled_errors(result.predictions, truth, labeled_idx)
    log.append(f"result unlabeled_errors={errors}")
    observed = np.zeros(len(truth), dtype=int)
    observed[labeled_idx] = truth[labeled_idx]
    _write_csv(outdir / f"predictions_seed{seed}.csv",
               ["index", "truth", "observed", "predicted"],
               [(i, truth[i], observed[i], result.predictions[i])
                for i in range(len(truth))])
    return [(seed, errors)]


# ---------------------------------------------------------------------------
# reproduction runners

TABLE1_SIGMAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
TABLE3_SIGMAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


def run_table1(outdir, seeds=DEFAULT_SEEDS, sigmas=TABLE1_SIGMAS,
               n: int = 3000, d: int = 100) -> Path:
    """Sphere distance table: masked norms of raw vs regularized errors."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for sigma in sigmas:
        for seed in seeds:
            cell = sphere_distance_cell(sigma, seed, n=n, d=d)
            rows.append((cell["sigma"], cell["seed"], cell["r"], cell["eps"],
                         cell["frob_raw"], cell["frob_reg"], cell["max_raw"],
                         cell["max_reg"], cell["pair_count"]))
    _write_csv(outdir / "table1.csv",
               ["sigma", "seed", "r", "eps", "frob_raw", "frob_reg",
                "max_raw", "max_reg", "pair_count"], rows)
    return outdir


def run_table3(outdir, seeds=DEFAULT_SEEDS, sigmas=TABLE3_SIGMAS,
               n: int = 1000, d: int = 100, K: int = 10) -> Path:
    """Two-moons classification errors and masked distance norms."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for sigma in sigmas:
        for seed in seeds:
            cell = moons_cell(sigma, seed, n=n, d=d, K=K)
            rows.append((cell["sigma"], cell["seed"], cell["errors_clean"],
                         cell["errors_raw"], cell["errors_regularized"],
                         cell["frob_raw"], cell["frob_reg"]))
    _write_csv(outdir / "table3.csv",
               ["sigma", "seed", "errors_clean", "errors_raw",
                "errors_regularized", "frob_raw", "frob_reg"], rows)
    return outdir


def run_table4(outdir, seeds=DEFAULT_SEEDS, a: int = 4, b: int = 9,
               n: int = 1000, K: int = 20, grid_images: int = 8) -> Path:
    """MNIST pair protocol: CV-selected radius, four graph variants."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    dataset = load_mnist_train()
    rows = []
    grid_rows = []
    for seed in seeds:
        cell = mnist_cell(seed, dataset=dataset, a=a, b=b, n=n, K=K)
        rows.append((cell["seed"], cell["r_selected"],
                     cell["errors_raw_full"], cell["errors_reg_full"],
                     cell["errors_raw_knn"], cell["errors_reg_knn"]))
        _write_csv(outdir / f"cv_table_seed{seed}.csv",
                   ["param", "mean_error"],
                   [(t["param"], t["mean_error"]) for t in cell["cv_table"]])
        if seed == seeds[0]:
            for stage, images in (("raw", cell["images_raw"]),
                                  ("regularized", cell["images_reg"])):
                for i in range(min(grid_images, len(images))):
                    grid_rows.append((stage, cell["digits"][i],
                                      *images[i]))
    _write_csv(outdir / "table4.csv",
               ["seed", "r_selected", "errors_raw_full", "errors_reg_full",
                "errors_raw_knn", "errors_reg_knn"], rows)
    _write_csv(outdir / "mnist_grid.csv",
               ["stage", "label"] + [f"p{i}" for i in range(784)], grid_rows)
    return outdir


def run_fig1(outdir, seed: int = 0, k: int = 100, n: int = 3000,
             d: int = 100, sigma_raw: float = 0.5,
             sigma_reg: float = 0.3) -> Path:
    """Sphere spectra CSVs: clean, raw at sigma_raw, regularized at
    sigma_reg, each against the closed-form sphere reference."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    reference = sphere_spectrum(k)
    jobs = (("clean", sigma_reg), ("raw", sigma_raw),
            ("regularized", sigma_reg))
    for stage, sigma in jobs:
        spectrum = sphere_spectrum_cell(sigma, seed, stage, k=k, n=n, d=d)
        export_spectrum_csv(outdir / f"spectrum_{stage}.csv", spectrum,
                            reference=reference)
    return outdir


def run_fig2(outdir, seed: int = 0, sigma: float = 0.5, n: int = 1000,
             d: int = 100) -> Path:
    """Two-moons scatter data: first two coordinates of X, Y, Ybar."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    X, labels = two_moons(n, d, rng)
    Y = add_noise(X, sigma, mode="ambient-ball", rng=rng)
    Ybar = ball_average(Y, sigma)
    rows = []
    for series, points in (("clean", X), ("raw", Y),
                           ("regularized", Ybar)):
        for i in range(n):
            rows.append((series, points[i, 0], points[i, 1],
                         int(labels[i])))
    _write_csv(outdir / "moons_scatter.csv",
               ["series", "x0", "x1", "label"], rows)
    return outdir
