import numpy as np
import pytest

from pointreg.cli import main
from pointreg.cloud import load_cloud
from pointreg.spectral import load_spectrum_csv


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_gen_sphere_writes_cloud(tmp_path, capsys):
    out = tmp_path / "cloud.csv"
    assert run_cli("gen", "--sampler", "sphere", "--n", 30, "--d", 3,
                   "--seed", 1, "--out", out) == 0
    assert "wrote" in capsys.readouterr().out
    cloud = load_cloud(out)
    assert cloud.points.shape == (30, 3)
    assert cloud.labels is None
    assert cloud.meta["sampler"] == "sphere"
    assert (tmp_path / "cloud.csv.meta").exists()


def test_gen_moons_with_noise_keeps_labels(tmp_path):
    out = tmp_path / "moons.csv"
    run_cli("gen", "--sampler", "two-moons", "--n", 40, "--d", 3,
            "--sigma", 0.2, "--seed", 0, "--out", out)
    cloud = load_cloud(out)
    assert cloud.points.shape == (40, 3)
    assert set(np.unique(cloud.labels)) == {-1.0, 1.0}


def test_regularize_round_trip(tmp_path):
    raw = tmp_path / "raw.csv"
    reg = tmp_path / "reg.csv"
    run_cli("gen", "--sampler", "two-moons", "--n", 40, "--d", 3,
            "--sigma", 0.3, "--seed", 2, "--out", raw)
    assert run_cli("regularize", "--in", raw, "--method", "ball",
                   "--param", 0.3, "--out", reg) == 0
    before = load_cloud(raw)
    after = load_cloud(reg)
    assert after.points.shape == before.points.shape
    assert after.meta["regularizer"] == "ball"
    assert not np.array_equal(after.points, before.points)
    assert np.array_equal(after.labels, before.labels)


def test_graph_and_spectrum_agree_with_edge_list(tmp_path):
    cloud = tmp_path / "cloud.csv"
    edges = tmp_path / "edges.txt"
    spec_direct = tmp_path / "direct.csv"
    spec_edges = tmp_path / "from_edges.csv"
    run_cli("gen", "--sampler", "sphere", "--n", 40, "--d", 3,
            "--seed", 3, "--out", cloud)
    assert run_cli("graph", "--in", cloud, "--kind", "epsilon",
                   "--eps", 1.0, "--out", edges) == 0
    header = edges.read_text().splitlines()[0].split()
    assert header[0] == "40" and header[2] == "epsilon"
    run_cli("spectrum", "--in", cloud, "--eps", 1.0, "--k", 5,
            "--reference", "sphere", "--out", spec_direct)
    run_cli("spectrum", "--edges", edges, "--k", 5, "--out", spec_edges)
    a = load_spectrum_csv(spec_direct)
    b = load_spectrum_csv(spec_edges)
    assert np.allclose(a["value_matrix_convention"],
                       b["value_matrix_convention"], rtol=1e-12)
    assert "reference" in a and "reference" not in b


def test_classify_with_grid(tmp_path, capsys):
    cloud = tmp_path / "moons.csv"
    outdir = tmp_path / "out"
    run_cli("gen", "--sampler", "two-moons", "--n", 60, "--d", 3,
            "--sigma", 0.1, "--seed", 0, "--out", cloud)
    assert run_cli("classify", "--in", cloud, "--grid", "0.05,0.2",
                   "--label-fraction", 0.1, "--K", 8,
                   "--out-dir", outdir) == 0
    printed = capsys.readouterr().out
    assert "selected ball parameter" in printed
    assert "unlabeled errors:" in printed
    cv_lines = (outdir / "cv_table.csv").read_text().splitlines()
    assert cv_lines[0] == "param,mean_error"
    assert len(cv_lines) == 3
    pred_lines = (outdir / "predictions.csv").read_text().splitlines()
    assert pred_lines[0] == "index,truth,observed,predicted"
    assert len(pred_lines) == 61


def test_bounds_table(capsys):
    assert run_cli("bounds", "--m", 2, "--R", 1.0, "--i0", 1.0,
                   "--K-curv", 1.0, "--p-min", 0.0795, "--p-max", 0.0796,
                   "--r", "0.1,0.5", "--sigma", 0.01) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t")[0] == "r"
    assert len(lines) == 3
    ok_row = lines[1].split("\t")
    assert ok_row[6] == "pass"
    assert float(ok_row[2]) < 0.1 < float(ok_row[3])
    bad_row = lines[2].split("\t")
    assert bad_row[6].startswith("fail:")
    assert bad_row[2] == "-"


def test_run_from_config(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    outdir = tmp_path / "runs"
    ini.write_text(f"""
[all]
sampler = sphere
n = 50
d = 3
sigma = 0.3
regularizer = ball
param = 0.5
task = distance-table
mask_param = 1.0
seeds = 0
outdir = {outdir}
""")
    assert run_cli("run", "--config", ini) == 0
    assert (outdir / "distance_table.csv").exists()
    assert (outdir / "manifest.txt").exists()


def test_repro_fig2(tmp_path):
    outdir = tmp_path / "fig2"
    assert run_cli("repro", "fig2", "--out-dir", outdir, "--seeds", "0") == 0
    lines = (outdir / "moons_scatter.csv").read_text().splitlines()
    assert lines[0] == "series,x0,x1,label"
    assert len(lines) == 1 + 3 * 1000


def test_errors_are_tagged_and_nonzero(tmp_path, capsys):
    missing = tmp_path / "absent.csv"
    assert run_cli("regularize", "--in", missing, "--method", "ball",
                   "--param", 0.5, "--out", tmp_path / "o.csv") == 1
    assert "error[regularize]:" in capsys.readouterr().err

    assert run_cli("run", "--config", tmp_path / "absent.ini") == 1
    err = capsys.readouterr().err
    assert "error[run]:" in err and "missing-config" in err

    cloud = tmp_path / "sphere.csv"
    run_cli("gen", "--sampler", "sphere", "--n", 20, "--d", 3,
            "--out", cloud)
    capsys.readouterr()
    assert run_cli("classify", "--in", cloud, "--label-fraction", 0.2,
                   "--out-dir", tmp_path / "out") == 1
    assert "insufficient-labels" in capsys.readouterr().err


def test_unknown_method_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit):
        run_cli("regularize", "--in", "x.csv", "--method", "median",
                "--param", 1.0, "--out", "y.csv")
