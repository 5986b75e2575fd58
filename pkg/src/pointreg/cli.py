"""Command-line interface.

Subcommands cover the pipeline end to end: gen (sample + noise),
regularize, graph, spectrum, classify, bounds, repro (canned experiment
protocols), and run (a config-file driven experiment).  Every failure
exits nonzero with a stage-tagged message on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .bounds import GeometryParams, assumption3_check, eta_bound, \
    failure_probability, r_bounds, r_difference_bound
from .classify import ProbitProblem, count_unlabeled_errors, cross_validate, \
    fit_probit
from .cloud import add_noise, load_cloud, save_cloud, sphere_uniform, two_moons
from .experiments import StageError, config_from_ini, run_experiment, \
    stratified_labels
from .graphs import epsilon_graph, export_edges, knn_restrict, laplacian, \
    load_edges, self_tuning_graph
from .regularize import BallAverage, KNNAverage, SelfTuningAverage
from .spectral import export_spectrum_csv, smallest_eigs, sphere_spectrum
from scipy.spatial.distance import pdist, squareform


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pointreg",
        description="Local regularization of noisy point clouds: sampling, "
                    "averaging, similarity graphs, spectra, classification, "
                    "and experiment reproduction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a cloud and optionally add noise")
    p.add_argument("--sampler", choices=("sphere", "two-moons"),
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--mode", choices=("ambient-ball", "normal-space"),
                   default="ambient-ball")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("regularize", help="locally average a cloud")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", choices=("ball", "knn", "self-tuning"),
                   required=True)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("graph", help="build a similarity graph edge list")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--kind", choices=("epsilon", "self-tuning"),
                   required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--vol", type=float, default=1.0)
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--restrict", choices=("union", "mutual"))
    p.add_argument("--restrict-K", dest="restrict_K", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("spectrum", help="smallest Laplacian eigenvalues")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--in", dest="infile", help="cloud CSV")
    group.add_argument("--edges", help="edge-list file")
    p.add_argument("--kind", choices=("epsilon", "self-tuning"),
                   default="epsilon")
    p.add_argument("--eps", type=float)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--vol", type=float, default=1.0)
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--laplacian", choices=("unnormalized",
                                           "symmetric-normalized"),
                   default="unnormalized")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--reference", choices=("sphere", "none"), default="none")
    p.add_argument("--out", required=True)

    p = sub.add_parser("classify", help="probit classification with CV")
    p.add_argument("--in", dest="infile", required=True,
                   help="cloud CSV with a ground-truth label column")
    p.add_argument("--graph", choices=("self-tuning",), default="self-tuning")
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--method", choices=("ball", "knn", "self-tuning"),
                   default="ball")
    p.add_argument("--grid", default="",
                   help="comma-separated regularizer parameters")
    p.add_argument("--label-fraction", dest="label_fraction", type=float,
                   required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--restrict", choices=("union", "mutual"))
    p.add_argument("--restrict-K", dest="restrict_K", type=int)
    p.add_argument("--out-dir", dest="outdir", required=True)

    p = sub.add_parser("bounds", help="radius bounds and assumption checks")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--i0", type=float, required=True)
    p.add_argument("--K-curv", dest="K_curv", type=float, required=True)
    p.add_argument("--p-min", dest="p_min", type=float, required=True)
    p.add_argument("--p-max", dest="p_max", type=float, required=True)
    p.add_argument("--C-M", dest="C_M", type=float, default=1.0)
    p.add_argument("--r", required=True,
                   help="comma-separated averaging radii")
    p.add_argument("--sigma", required=True,
                   help="comma-separated noise sizes")
    p.add_argument("--n", type=int, default=1000)

    p = sub.add_parser("repro", help="run a canned experiment protocol")
    p.add_argument("target",
                   choices=("table1", "table3", "table4", "fig1", "fig2"))
    p.add_argument("--out-dir", dest="outdir", required=True)
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--n", type=int, default=None,
                   help="override the sample size (fig1/fig2 only)")

    p = sub.add_parser("run", help="run an experiment from a config file")
    p.add_argument("--config", required=True)

    return parser


def _cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.sampler == "sphere":
        points, labels = sphere_uniform(args.n, args.d, rng), None
    else:
        points, labels = two_moons(args.n, args.d, rng)
    if args.sigma > 0:
        points = add_noise(points, args.sigma, mode=args.mode, rng=rng)
    meta = {"sampler": args.sampler, "sigma": args.sigma, "mode": args.mode,
            "seed": args.seed}
    save_cloud(args.out, points, labels=labels, meta=meta)
    print(f"wrote {args.out} ({points.shape[0]} x {points.shape[1]})")
    return 0


_METHODS = {"ball": lambda p: BallAverage(r=p),
            "knn": lambda p: KNNAverage(k=int(p)),
            "self-tuning": lambda p: SelfTuningAverage(K=int(p))}


def _cmd_regularize(args) -> int:
    cloud = load_cloud(args.infile)
    est = _METHODS[args.method](args.param)
    out = est.fit(cloud.points).transform(cloud.points)
    meta = dict(cloud.meta)
    meta.update({"regularizer": args.method, "param": args.param})
    save_cloud(args.out, out, labels=cloud.labels, meta=meta)
    print(f"wrote {args.out}")
    return 0


def _build_graph(points, args):
    D = squareform(pdist(points))
    if args.kind == "epsilon":
        eps = args.eps
        if eps is None:
            eps = experiments.sphere_eps(len(points))
        graph = epsilon_graph(D, eps, m=args.m, vol=args.vol)
    else:
        graph = self_tuning_graph(D, args.K)
    if getattr(args, "restrict", None):
        graph = knn_restrict(graph, D, args.restrict_K or args.K,
                             rule=args.restrict)
    return graph


def _cmd_graph(args) -> int:
    cloud = load_cloud(args.infile)
    graph = _build_graph(cloud.points, args)
    export_edges(graph, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_spectrum(args) -> int:
    if args.edges:
        graph = load_edges(args.edges)
    else:
        cloud = load_cloud(args.infile)
        graph = _build_graph(cloud.points, args)
    spectrum = smallest_eigs(laplacian(graph, args.laplacian), args.k)
    reference = sphere_spectrum(args.k) if args.reference == "sphere" \
        else None
    export_spectrum_csv(args.out, spectrum, reference=reference)
    print(f"wrote {args.out}")
    return 0


def _cmd_classify(args) -> int:
    cloud = load_cloud(args.infile)
    if cloud.labels is None:
        raise ValueError("insufficient-labels: input cloud has no label "
                         "column")
    truth = cloud.labels.astype(int)
    rng = np.random.default_rng(args.seed)
    per_class = max(1, round(args.label_fraction * cloud.n / 2))
    labeled_idx = stratified_labels(truth, per_class, rng)
    labeled_val = truth[labeled_idx].astype(float)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    grid_params = [float(s) for s in args.grid.split(",") if s.strip()]
    points = cloud.points
    if grid_params:
        entries = [_METHODS[args.method](p) for p in grid_params]
        cv = cross_validate(points, labeled_idx, labeled_val, entries,
                            graph_K=args.K, repeats=args.repeats, rng=rng,
                            gamma=args.gamma, restrict=args.restrict,
                            restrict_K=args.restrict_K)
        experiments._write_csv(outdir / "cv_table.csv",
                               ["param", "mean_error"],
                               [(t["param"], t["mean_error"])
                                for t in cv.table])
        chosen = entries[cv.best_index]
        points = chosen.fit(points).transform(points)
        print(f"selected {args.method} parameter {cv.best_param:g}")
    D = squareform(pdist(points))
    graph = self_tuning_graph(D, args.K)
    if args.restrict:
        graph = knn_restrict(graph, D, args.restrict_K or args.K,
                             rule=args.restrict)
    problem = ProbitProblem(graph, labeled_idx, labeled_val,
                            gamma=args.gamma)
    result = fit_probit(problem)
    errors = count_unlabeled_errors(result.predictions, truth, labeled_idx)
    observed = np.zeros(cloud.n, dtype=int)
    observed[labeled_idx] = truth[labeled_idx]
    experiments._write_csv(outdir / "predictions.csv",
                           ["index", "truth", "observed", "predicted"],
                           [(i, truth[i], observed[i], result.predictions[i])
                            for i in range(cloud.n)])
    print(f"unlabeled errors: {errors} of {cloud.n - len(labeled_idx)}")
    return 0


def _cmd_bounds(args) -> int:
    params = GeometryParams(m=args.m, R=args.R, i0=args.i0,
                            K_curv=args.K_curv, p_min=args.p_min,
                            p_max=args.p_max, C_M=args.C_M)
    radii = [float(s) for s in args.r.split(",") if s.strip()]
    sigmas = [float(s) for s in args.sigma.split(",") if s.strip()]
    header = ("r", "sigma", "r_minus", "r_plus", "diff_bound", "eta",
              "assumption3", "failure_prob")
    print("\t".join(header))
    for r in radii:
        for sigma in sigmas:
            verdict = assumption3_check(r, sigma, params)
            tag = "pass" if verdict else "fail:" + verdict.violations[0]
            if verdict:
                lo, hi = r_bounds(r, sigma, params)
                diff = r_difference_bound(r, sigma, params.m, params.R)
                eta = eta_bound(r, sigma, params.C_M)
                prob = failure_probability(args.n, r, params.m, params.p_min)
                print(f"{r:g}\t{sigma:g}\t{lo:.6g}\t{hi:.6g}\t{diff:.6g}"
                      f"\t{eta:.6g}\t{tag}\t{prob:.3g}")
            else:
                print(f"{r:g}\t{sigma:g}\t-\t-\t-\t-\t{tag}\t-")
    return 0


def _cmd_repro(args) -> int:
    seeds = tuple(int(s) for s in args.seeds.split(",") if s.strip())
    size = {} if args.n is None else {"n": args.n}
    runner = {"table1": experiments.run_table1,
              "table3": experiments.run_table3,
              "table4": experiments.run_table4,
              "fig1": lambda out, seeds: experiments.run_fig1(
                  out, seed=seeds[0], **size),
              "fig2": lambda out, seeds: experiments.run_fig2(
                  out, seed=seeds[0], **size)}[args.target]
    if args.target.startswith("fig"):
        outdir = runner(args.outdir, seeds)
    else:
        outdir = runner(args.outdir, seeds=seeds)
    print(f"wrote {outdir}")
    return 0


def _cmd_run(args) -> int:
    cfg = config_from_ini(args.config)
    outdir = run_experiment(cfg)
    print(f"wrote {outdir}")
    return 0


_HANDLERS = {"gen": _cmd_gen, "regularize": _cmd_regularize,
             "graph": _cmd_graph, "spectrum": _cmd_spectrum,
             "classify": _cmd_classify, "bounds": _cmd_bounds,
             "repro": _cmd_repro, "run": _cmd_run}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except StageError as exc:
        print(f"error[{exc.stage}]: {exc.cause}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error[{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
