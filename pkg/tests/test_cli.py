import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fracriesz import __version__
from fracriesz.cli import main
from fracriesz.fractals import vicsek_counts
from fracriesz.graph import read_edge_list
from fracriesz.pipeline import OUTPUT_ENV


@pytest.fixture(scope="module")
def vgraph(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "v4.txt"
    assert main(["generate", "--family", "vicsek", "--level", "4", "--lazy", "0.5", "--out", str(path)]) == 0
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_generate(vgraph, capsys, tmp_path):
    g, meta = read_edge_list(vgraph)
    v, e = vicsek_counts(4)
    # the lazy walk adds one self-loop per vertex
    assert (g.n_vertices, g.n_edges) == (v, e + v)
    assert meta["family"] == "vicsek" and meta["laziness"] == 0.5
    assert meta["beta_expected"] == pytest.approx(math.log(5, 3) + 1)
    out = tmp_path / "s.txt"
    main(["generate", "--family", "sierpinski", "--level", "3", "--out", str(out)])
    assert "42 vertices" in capsys.readouterr().out


def test_certify(vgraph, tmp_path, capsys):
    out = tmp_path / "cert.json"
    assert main(["certify", "--graph", str(vgraph), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["analyticity_ell"] == 0 and rep["epsilon"] > 0
    assert rep["diameter"] == 54
    raw = tmp_path / "raw.txt"
    main(["generate", "--family", "vicsek", "--level", "2", "--out", str(raw)])
    capsys.readouterr()
    assert main(["certify", "--graph", str(raw)]) == 0
    assert "failed" in json.loads(capsys.readouterr().out)["analyticity"]


@pytest.mark.parametrize("what", ["volume", "escape", "ue", "dkue"])
def test_verify_scaling(vgraph, tmp_path, what):
    out = tmp_path / f"{what}.csv"
    args = ["verify-scaling", "--graph", str(vgraph), "--what", what, "--out", str(out)]
    if what in ("ue", "dkue"):
        args += ["--ks", "16,32,64,128"]
    assert main(args) == 0
    rows = read_rows(out)
    assert rows and {r["quantity"] for r in rows} == {what}
    assert out.with_suffix(".png").exists() == (what in ("volume", "escape"))


def test_spectrum(tmp_path):
    g = tmp_path / "p.txt"
    main(["generate", "--family", "lattice_box", "--dim", "1", "--level", "5", "--lazy", "0.5", "--out", str(g)])
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--graph", str(g), "--out", str(out)]) == 0
    lam = [float(r["eigenvalue"]) for r in read_rows(out)]
    # lazy path: 1/2 (1 - cos(pi k / n)) up to end-weight effects; check range and kernel
    assert len(lam) == 5 and abs(lam[0]) < 1e-12 and max(lam) <= 1 + 1e-12
    assert np.all(np.diff(lam) >= -1e-12)


def test_riesz_scan_and_threads(vgraph, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["riesz-scan", "--graph", str(vgraph), "--p", "2,4", "--gamma", "0.3,0.5"]
    assert main(base + ["--out", str(a), "--plot-script", str(tmp_path / "d.gp")]) == 0
    assert main(["--threads", "3"] + base + ["--out", str(b), "--no-figure"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".png").exists() and not b.with_suffix(".png").exists()
    cell = {(r["p"], r["gamma"], r["direction"]): r["classification"] for r in read_rows(a) if r["family"] == "all"}
    assert cell[("2", "0.5", "R")] == "bounded" and cell[("2", "0.3", "RR")] == "growing"
    assert "plot" in (tmp_path / "d.gp").read_text()


def test_riesz_scan_bad_family(vgraph, tmp_path):
    with pytest.raises(SystemExit):
        main(["riesz-scan", "--graph", str(vgraph), "--families", "spline", "--out", str(tmp_path / "x.csv")])


def test_poincare(vgraph, tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert main(["poincare", "--graph", str(vgraph), "--radii", "2,4,6,9", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    worst = float(text.split("worst ratio")[1].split()[0])
    assert worst <= 1
    assert len(read_rows(out)) == 4


def test_run_with_env_override(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "min.cfg"
    cfg.write_text("family = lattice_box\ndimension = 1\nlevel = 16\np_grid = 2\ngamma_grid = 0.5\n")
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "envout"))
    assert main(["run", "--config", str(cfg), "--no-figure"]) == 0
    assert (tmp_path / "envout" / "manifest.json").exists()
    assert main(["run", "--config", str(cfg), "--no-figure", "--out-dir", str(tmp_path / "cli")]) == 0
    assert (tmp_path / "cli" / "phase.csv").read_bytes() == (tmp_path / "envout" / "phase.csv").read_bytes()


def test_errors_are_reported(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family = vicsek\nlevel = 3\np_grid = 2\ngamma_grid = 1.5\n")
    assert main(["run", "--config", str(cfg)]) == 1
    assert "gamma_grid" in capsys.readouterr().err
    assert main(["--threads", "0", "spectrum", "--graph", "x", "--out", "y"]) == 2


def test_console_entry_version():
    r = subprocess.run([sys.executable, "-m", "fracriesz", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == __version__
