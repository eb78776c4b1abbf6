"""End-to-end run: generate, certify, verify scaling, scan Riesz ratios.

Every artifact is first written with a ``.partial`` suffix and only renamed
once all stages succeed; a failing stage raises :class:`PipelineError`
naming the stage and leaves the partial files behind for inspection.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, emit_config
from .errors import FitError, PipelineError
from .fractals import generate
from .fracpow import make_backend
from .graph import (
    WeightedGraph,
    certify_analyticity,
    certify_nondegeneracy,
    doubling_witness,
    lazify,
    write_edge_list,
)
from .plotting import plot_phase_diagram, plot_scaling_fits
from .riesz import PhaseThresholds, WitnessFamily, default_scales, phase_diagram
from .scaling import (
    default_radii,
    fit_escape_exponent,
    fit_volume_growth,
    on_diagonal_fit,
    verify_dkue,
    verify_ue_shape,
)

__all__ = ["OUTPUT_ENV", "PipelineResult", "run_pipeline", "resolve_output_dir", "fits_csv_rows", "write_csv"]

OUTPUT_ENV = "FRACRIESZ_OUTPUT_DIR"
FITS_HEADER = "quantity,scale,value,fit_exponent,residual"


@dataclass
class PipelineResult:
    output_dir: Path
    files: dict[str, Path]
    manifest: dict


def resolve_output_dir(config: ExperimentConfig, override=None) -> Path:
    """Explicit override, then the environment variable, then the config."""
    if override is not None:
        return Path(override)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else Path(config.output_dir)


def _g(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{float(x):.12g}"


def write_csv(path, header: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for r in rows:
            fh.write(",".join(r) + "\n")


def fits_csv_rows(quantity: str, fit) -> list[list[str]]:
    return [[quantity, _g(s), _g(v), _g(fit.exponent), _g(fit.residual)] for s, v in fit.sample]


def _shape_rows(quantity: str, shape) -> list[list[str]]:
    # value = worst positive residual at this k; exponent column holds c.
    return [[quantity, _g(k), _g(v), _g(shape.c), _g(shape.violation)] for k, v in shape.per_step]


def _ue_steps(g: WeightedGraph, budget: float = 2e9) -> list[int]:
    k_max = 1024
    while k_max > 16 and k_max * g.n_vertices > budget:
        k_max //= 2
    return [int(k) for k in 2 ** np.arange(4, int(math.log2(k_max)) + 1)]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_pipeline(config: ExperimentConfig, output_dir=None, threads: int = 1, figures: bool = True) -> PipelineResult:
    out = resolve_output_dir(config, output_dir)
    out.mkdir(parents=True, exist_ok=True)
    partial: dict[str, Path] = {}
    times: dict[str, float] = {}
    notes: dict[str, object] = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            result = fn()
        except PipelineError:
            raise
        except Exception as exc:  # every failure is reported with its stage
            raise PipelineError(name, f"{type(exc).__name__}: {exc}") from exc
        times[name] = round(time.perf_counter() - t0, 3)
        return result

    def target(name: str) -> Path:
        p = out / (name + ".partial")
        partial[name] = p
        return p

    def gen():
        g0, exps = generate(config.generator)
        g = lazify(g0, config.laziness) if config.laziness > 0 else g0
        write_edge_list(g, target("graph.txt"), expected=exps)
        return g, exps

    g, exps = stage("generate", gen)

    def cert():
        eps = certify_nondegeneracy(g)
        an = certify_analyticity(g)
        x = g.center if g.center is not None else 0
        radii = [r for r in (1, 2, 4, 8, 16) if 2 * r <= g.eccentricity(x)]
        dbl = doubling_witness(g, [x], radii) if radii else float("nan")
        return {
            "n_vertices": g.n_vertices,
            "n_edges": g.n_edges,
            "M": g.M,
            "epsilon": eps,
            "analyticity_ell": an.ell,
            "analyticity_eps": an.eps,
            "doubling_ratio": dbl,
            "laziness": g.laziness,
        }

    notes["certificates"] = stage("certify", cert)
    x = g.center if g.center is not None else 0

    def verify():
        rows, fits, skipped = [], {}, {}
        beta_fit = None
        for q in config.verify:
            try:
                if q == "volume":
                    f = fit_volume_growth(g, [x], default_radii(g))
                    fits["volume"] = f
                    rows += fits_csv_rows("volume", f)
                elif q == "escape":
                    f = fit_escape_exponent(g, x, default_radii(g))
                    fits["escape"] = f
                    beta_fit = f.exponent
                    rows += fits_csv_rows("escape", f)
                elif q in ("ue", "dkue"):
                    b = beta_fit if beta_fit is not None else exps.beta_expected
                    ks = _ue_steps(g)
                    shape = (verify_ue_shape if q == "ue" else verify_dkue)(g, x, ks, b, floor=config.kernel_floor)
                    rows += _shape_rows(q, shape)
                    if q == "ue":
                        f = on_diagonal_fit(g, x, ks)
                        fits["on_diagonal"] = f
                        rows += fits_csv_rows("on_diagonal", f)
            except FitError as exc:
                skipped[q] = str(exc)
        write_csv(target("fits.csv"), FITS_HEADER, rows)
        if figures and fits:
            expected = {"volume": exps.D_expected, "escape": exps.beta_expected,
                        "on_diagonal": -exps.D_expected / exps.beta_expected}
            plot_scaling_fits(fits, target("fits.png"), expected)
        return skipped

    notes["skipped_fits"] = stage("verify-scaling", verify)

    def scan():
        beta = exps.beta_expected
        fams = [WitnessFamily(k, x, default_scales(g, k, x, beta, config.n_scales), beta=beta, seed=config.seed)
                for k in config.families]
        backend = make_backend(g, config.method, tol=config.tail_tol)
        th = PhaseThresholds(config.slope_min, config.slope_eps, config.residual_max)
        pd = phase_diagram(g, config.p_grid, config.gamma_grid, fams, backend=backend, thresholds=th, threads=threads)
        pd.to_csv(target("phase.csv"))
        if figures:
            plot_phase_diagram(pd, beta, target("phase.png"))
        return {"backend": pd.backend, "families": {f.kind: list(f.scales) for f in fams}}

    notes["riesz"] = stage("riesz-scan", scan)

    final = {}
    for name, p in partial.items():
        dest = out / name
        os.replace(p, dest)
        final[name] = dest
    manifest = {
        "tool": "fracriesz",
        "version": __version__,
        "config": emit_config(config),
        "expected_exponents": asdict(exps),
        "threads": threads,
        "wall_times_s": times,
        **notes,
        "files": {name: {"sha256": _sha256(p), "bytes": p.stat().st_size} for name, p in sorted(final.items())},
    }
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
    final["manifest.json"] = mpath
    return PipelineResult(out, final, manifest)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)
