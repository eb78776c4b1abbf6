import csv
import hashlib
import json
from pathlib import Path

import pytest

import fracriesz.pipeline as pipeline
from fracriesz.config import parse_config, parse_config_text, with_overrides
from fracriesz.errors import PipelineError
from fracriesz.graph import read_edge_list
from fracriesz.pipeline import OUTPUT_ENV, resolve_output_dir, run_pipeline

GOLDEN = Path(__file__).parent / "golden"

MINIMAL = """family = lattice_box
dimension = 1
level = 16
p_grid = 2
gamma_grid = 0.5
"""


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def reference(tmp_path_factory):
    cfg = with_overrides(parse_config(GOLDEN / "vicsek5.cfg"), method="spectral")
    return run_pipeline(cfg, output_dir=tmp_path_factory.mktemp("ref"), figures=True)


def test_minimal_single_bounded_cell(tmp_path):
    res = run_pipeline(parse_config_text(MINIMAL), output_dir=tmp_path, figures=False)
    verdicts = [r for r in rows(res.files["phase.csv"]) if r["family"] == "all"]
    assert [(r["direction"], r["classification"]) for r in verdicts] == [("R", "bounded"), ("RR", "bounded")]
    assert float(verdicts[0]["slope"]) == 0.0
    g, meta = read_edge_list(res.files["graph.txt"])
    assert g.n_vertices == 16 and meta["laziness"] == 0.5
    # too small for volume and escape fits; recorded rather than silently dropped
    assert {"volume", "escape"} <= set(res.manifest["skipped_fits"])


def test_reference_matches_golden(reference):
    # fits do not involve fractional powers, so they must agree byte for byte
    assert reference.files["fits.csv"].read_bytes() == (GOLDEN / "vicsek5_fits.csv").read_bytes()
    got = rows(reference.files["phase.csv"])
    want = rows(GOLDEN / "vicsek5_phase.csv")
    assert len(got) == len(want)
    for a, b in zip(got, want):
        key = ("p", "gamma", "direction", "family", "classification")
        assert tuple(a[k] for k in key) == tuple(b[k] for k in key)
        assert float(a["slope"]) == pytest.approx(float(b["slope"]), abs=1e-7)
        assert float(a["residual"]) == pytest.approx(float(b["residual"]), abs=1e-7)


def test_reference_outputs_and_manifest(reference):
    out = reference.output_dir
    names = {"graph.txt", "fits.csv", "fits.png", "phase.csv", "phase.png", "manifest.json"}
    assert names <= {p.name for p in out.iterdir()}
    assert not list(out.glob("*.partial"))
    man = json.loads((out / "manifest.json").read_text())
    assert set(man["files"]) == names - {"manifest.json"}
    for name, info in man["files"].items():
        assert info["sha256"] == hashlib.sha256((out / name).read_bytes()).hexdigest()
    assert set(man["wall_times_s"]) == {"generate", "certify", "verify-scaling", "riesz-scan"}
    assert man["certificates"]["analyticity_ell"] == 0
    assert parse_config_text(man["config"]).level == 5
    assert (out / "phase.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_thread_count_does_not_change_csv(reference, tmp_path):
    cfg = with_overrides(parse_config(GOLDEN / "vicsek5.cfg"), method="spectral")
    res = run_pipeline(cfg, output_dir=tmp_path, threads=3, figures=False)
    for name in ("phase.csv", "fits.csv", "graph.txt"):
        assert res.files[name].read_bytes() == reference.files[name].read_bytes()


def test_failure_names_stage_and_keeps_partials(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("synthetic")

    monkeypatch.setattr(pipeline, "phase_diagram", boom)
    with pytest.raises(PipelineError) as exc:
        run_pipeline(parse_config_text(MINIMAL), output_dir=tmp_path, figures=False)
    assert exc.value.stage == "riesz-scan"
    assert "synthetic" in str(exc.value)
    names = {p.name for p in tmp_path.iterdir()}
    assert {"graph.txt.partial", "fits.csv.partial"} <= names
    assert "manifest.json" not in names and "graph.txt" not in names


def test_generate_failure_stage(tmp_path):
    cfg = with_overrides(parse_config_text(MINIMAL), family="vicsek", level=9, cap=1000)
    with pytest.raises(PipelineError) as exc:
        run_pipeline(cfg, output_dir=tmp_path)
    assert exc.value.stage == "generate"


def test_output_dir_precedence(tmp_path, monkeypatch):
    cfg = with_overrides(parse_config_text(MINIMAL), output_dir=str(tmp_path / "cfg"))
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    assert resolve_output_dir(cfg) == tmp_path / "cfg"
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert resolve_output_dir(cfg) == tmp_path / "env"
    assert resolve_output_dir(cfg, tmp_path / "arg") == tmp_path / "arg"
    res = run_pipeline(cfg, figures=False)
    assert res.output_dir == tmp_path / "env" and (tmp_path / "env" / "phase.csv").exists()
